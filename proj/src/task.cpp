#include "gswcast/task.hpp"

#include <algorithm>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"
#include "lexer.hpp"

namespace gswcast {

std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::Sum: return "SUM";
    case Aggregate::Count: return "COUNT";
    case Aggregate::Avg: return "AVG";
  }
  return "SUM";
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

void check_ranges(const ForecastTask& t) {
  if (t.t_start > t.t_end) {
    throw Error(ErrorCode::EmptyWindow,
                "window (" + std::to_string(t.t_start) + ", " + std::to_string(t.t_end) + ") is empty");
  }
  if (t.fore_period < 1) throw Error(ErrorCode::InvalidHorizon, "FORE_PERIOD must be at least 1");
  if (!(t.gamma > 0.0 && t.gamma < 1.0)) throw Error(ErrorCode::InvalidConfidence, "GAMMA must lie in (0, 1)");
}

}  // namespace

std::string ForecastTask::to_string() const {
  std::string s = "FORECAST ";
  s += gswcast::to_string(aggregate);
  s += '(';
  s += aggregate == Aggregate::Count ? "*" : measure;
  s += ") FROM " + table + " WHERE " + constraint.to_string();
  s += " USING (" + std::to_string(t_start) + ", " + std::to_string(t_end) + ")";
  s += " OPTION (MODEL=" + quote(model) + ", FORE_PERIOD=" + std::to_string(fore_period);
  s += ", GAMMA=" + format_double(gamma);
  if (error_target) s += ", ERROR_TARGET=" + format_double(*error_target);
  s += ")";
  return s;
}

ForecastTask parse_task(std::string_view text) {
  detail::Lexer lex(text);
  ForecastTask t;
  lex.expect_keyword("FORECAST");
  if (lex.is_keyword("SUM")) {
    t.aggregate = Aggregate::Sum;
  } else if (lex.is_keyword("COUNT")) {
    t.aggregate = Aggregate::Count;
  } else if (lex.is_keyword("AVG")) {
    t.aggregate = Aggregate::Avg;
  } else {
    throw SyntaxError(lex.peek().pos, "SUM, COUNT or AVG");
  }
  lex.next();
  lex.expect_symbol("(");
  if (t.aggregate == Aggregate::Count) {
    lex.expect_symbol("*");
  } else {
    t.measure = lex.expect_ident("measure name");
  }
  lex.expect_symbol(")");
  lex.expect_keyword("FROM");
  t.table = lex.expect_ident("table name");
  lex.expect_keyword("WHERE");
  t.constraint = detail::parse_constraint_expr(lex);
  lex.expect_keyword("USING");
  lex.expect_symbol("(");
  t.t_start = lex.expect_int("start timestamp");
  lex.expect_symbol(",");
  t.t_end = lex.expect_int("end timestamp");
  lex.expect_symbol(")");
  lex.expect_keyword("OPTION");
  lex.expect_symbol("(");
  bool have_period = false;
  bool have_model = false;
  bool have_gamma = false;
  for (;;) {
    const auto key_pos = lex.peek().pos;
    const std::string key = lex.expect_ident("option name");
    lex.expect_symbol("=");
    auto once = [&](bool& seen) {
      if (seen) throw SyntaxError(key_pos, "each option at most once");
      seen = true;
    };
    if (detail::Lexer::iequals(key, "MODEL")) {
      once(have_model);
      if (lex.peek().kind != detail::Tok::String) throw SyntaxError(lex.peek().pos, "quoted model name");
      t.model = lex.next().text;
    } else if (detail::Lexer::iequals(key, "FORE_PERIOD")) {
      once(have_period);
      const auto pos = lex.peek().pos;
      const auto h = lex.expect_int("forecast period");
      if (h > 1'000'000 || h < -1'000'000) throw SyntaxError(pos, "forecast period within range");
      t.fore_period = static_cast<int>(h);
    } else if (detail::Lexer::iequals(key, "GAMMA")) {
      once(have_gamma);
      t.gamma = lex.expect_number("confidence level");
    } else if (detail::Lexer::iequals(key, "ERROR_TARGET")) {
      if (t.error_target) throw SyntaxError(key_pos, "each option at most once");
      t.error_target = lex.expect_number("error target");
    } else {
      throw SyntaxError(key_pos, "MODEL, FORE_PERIOD, GAMMA or ERROR_TARGET");
    }
    if (lex.is_symbol(",")) {
      lex.next();
      continue;
    }
    lex.expect_symbol(")");
    break;
  }
  if (!have_period) throw SyntaxError(lex.peek().pos, "FORE_PERIOD option");
  if (lex.peek().kind != detail::Tok::End) throw SyntaxError(lex.peek().pos, "end of statement");
  check_ranges(t);
  return t;
}

void validate_task(const ForecastTask& task, const TimeSeriesTable& schema) {
  if (task.aggregate != Aggregate::Count) schema.measure_index(task.measure);
  (void)BoundConstraint::bind(task.constraint, schema);
}

ForecastTask parse_task(std::string_view text, const TimeSeriesTable& schema) {
  auto t = parse_task(text);
  validate_task(t, schema);
  return t;
}

std::string AggregationQuery::to_sql(std::string_view ts_column) const {
  std::string s = "SELECT ";
  s += to_string(aggregate);
  s += '(';
  s += aggregate == Aggregate::Count ? "*" : measure;
  s += ") FROM " + table + " WHERE (" + constraint.to_string() + ") AND " + std::string(ts_column) + " = " +
       std::to_string(timestamp);
  return s;
}

std::vector<std::int64_t> window_timestamps(const ForecastTask& task, std::span<const std::int64_t> timeline) {
  std::vector<std::int64_t> out;
  if (timeline.empty()) {
    for (std::int64_t t = task.t_start;; ++t) {
      out.push_back(t);
      if (t == task.t_end) break;
    }
    return out;
  }
  for (auto t : timeline) {
    if (t >= task.t_start && t <= task.t_end) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AggregationQuery> rewrite_to_aggregations(const ForecastTask& task,
                                                      std::span<const std::int64_t> timeline) {
  std::vector<AggregationQuery> out;
  for (auto ts : window_timestamps(task, timeline)) {
    out.push_back({task.aggregate, task.measure, task.table, task.constraint, ts});
  }
  return out;
}

}  // namespace gswcast
