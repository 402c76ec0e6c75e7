// Copyright 2026 The CPRL Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cprl/metrics.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "cprl/domain.hpp"

namespace cprl {

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("format_real: conversion failed");
  return std::string(buf, end);
}

void MetricsTrace::validate() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].step <= rows[i - 1].step) {
      throw Error("metrics trace: step column not strictly increasing at row " +
                  std::to_string(i));
    }
  }
}

namespace {

void put_optional(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (v) out << format_real(*v);
}

std::optional<double> parse_optional(const std::string& cell, std::size_t line) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw Error("metrics csv line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsTrace& trace) {
  out << kMetricsHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.step << ',' << r.episodes << ',' << format_real(r.epsilon);
    put_optional(out, r.avg_reward);
    put_optional(out, r.q_loss);
    put_optional(out, r.kl_loss);
    put_optional(out, r.total_loss);
    put_optional(out, r.gold_hit_rate);
    put_optional(out, r.silver_hit_rate);
    put_optional(out, r.crisis_recall);
    out << '\n';
  }
}

MetricsTrace read_metrics_csv(std::istream& in, double kl_beta) {
  MetricsTrace trace;
  trace.kl_beta = kl_beta;
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw Error("metrics csv: missing or unexpected header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 10) {
      throw Error("metrics csv line " + std::to_string(line_no) + ": expected 10 columns");
    }
    MetricsRow r;
    r.step = static_cast<std::uint64_t>(parse_optional(cells[0], line_no).value_or(0));
    r.episodes = static_cast<std::uint64_t>(parse_optional(cells[1], line_no).value_or(0));
    r.epsilon = parse_optional(cells[2], line_no).value_or(0.0);
    r.avg_reward = parse_optional(cells[3], line_no);
    r.q_loss = parse_optional(cells[4], line_no);
    r.kl_loss = parse_optional(cells[5], line_no);
    r.total_loss = parse_optional(cells[6], line_no);
    r.gold_hit_rate = parse_optional(cells[7], line_no);
    r.silver_hit_rate = parse_optional(cells[8], line_no);
    r.crisis_recall = parse_optional(cells[9], line_no);
    trace.rows.push_back(r);
  }
  trace.validate();
  return trace;
}

}  // namespace cprl
