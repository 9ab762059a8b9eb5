#include "mesgame/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace mesgame {

const char* parameter_name(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::capacity_mean:
      return "capacity_mean";
    case SweepParameter::fleet_size:
      return "fleet_size";
    case SweepParameter::loading_weight:
      return "loading_weight";
    case SweepParameter::degradation_weight:
      return "degradation_weight";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_parameter(std::string_view name) {
  for (const auto p :
       {SweepParameter::capacity_mean, SweepParameter::fleet_size,
        SweepParameter::loading_weight, SweepParameter::degradation_weight})
    if (name == parameter_name(p)) return p;
  return std::nullopt;
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty())
    throw ScenarioError("sweep.values", "at least one value required");
  if (spec.seeds.empty())
    throw ScenarioError("sweep.seeds", "at least one seed required");
  if (spec.schemes.empty())
    throw ScenarioError("sweep.schemes", "at least one scheme required");
  const bool needs_spec = spec.parameter == SweepParameter::capacity_mean ||
                          spec.parameter == SweepParameter::fleet_size;
  if (needs_spec && !spec.base.fleet_spec)
    throw ScenarioError("sweep.parameter",
                        std::string(parameter_name(spec.parameter)) +
                            " needs a scenario with [fleet_spec]");
  for (const double v : spec.values) {
    if (!std::isfinite(v) || v < 0.0)
      throw ScenarioError("sweep.values", "values must be finite and >= 0");
    if (spec.parameter == SweepParameter::fleet_size && v <= 0.0)
      throw ScenarioError("sweep.values", "fleet_size multipliers must be > 0");
  }
}

namespace {

std::vector<std::string_view> tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r' ||
            text[pos] == ','))
      ++pos;
    const auto start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' &&
           text[pos] != '\r' && text[pos] != ',')
      ++pos;
    if (pos > start) out.push_back(text.substr(start, pos - start));
  }
  return out;
}

template <typename T>
T parse_value(std::string_view token, const std::string& field) {
  T value{};
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ScenarioError(field, "cannot parse '" + std::string(token) + "'");
  return value;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view text,
                           const std::filesystem::path& base_dir) {
  SweepSpec spec;
  bool in_section = false;
  bool have_scenario = false;
  bool have_parameter = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = std::min(text.find('\n', pos), text.size());
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t[0] == "[sweep]") {
      in_section = true;
      continue;
    }
    if (!in_section || t.size() < 3 || t[1] != "=")
      throw ScenarioError("sweep", "expected 'key = value' in [sweep]");
    const std::string key(t[0]);
    const std::vector<std::string_view> values(t.begin() + 2, t.end());
    const std::string field = "sweep." + key;
    if (key == "scenario") {
      spec.base = read_scenario_document(base_dir / std::string(values[0]));
      have_scenario = true;
    } else if (key == "parameter") {
      const auto p = parse_parameter(values[0]);
      if (!p)
        throw ScenarioError(field, "unknown parameter '" +
                                       std::string(values[0]) + "'");
      spec.parameter = *p;
      have_parameter = true;
    } else if (key == "values") {
      for (const auto v : values) spec.values.push_back(parse_value<double>(v, field));
    } else if (key == "seeds") {
      for (const auto v : values)
        spec.seeds.push_back(parse_value<std::uint64_t>(v, field));
    } else if (key == "seed_range") {
      if (values.size() != 2)
        throw ScenarioError(field, "expected 'seed_range = first last'");
      const auto first = parse_value<std::uint64_t>(values[0], field);
      const auto last = parse_value<std::uint64_t>(values[1], field);
      for (auto s = first; s <= last; ++s) spec.seeds.push_back(s);
    } else if (key == "schemes") {
      spec.schemes.clear();
      for (const auto v : values) {
        const auto s = parse_scheme(std::string(v));
        if (!s)
          throw ScenarioError(field, "unknown scheme '" + std::string(v) + "'");
        spec.schemes.push_back(*s);
      }
    } else {
      throw ScenarioError(field, "unknown key");
    }
  }
  if (!have_scenario) throw ScenarioError("sweep.scenario", "missing");
  if (!have_parameter) throw ScenarioError("sweep.parameter", "missing");
  validate(spec);
  return spec;
}

SweepSpec read_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("file", "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_spec(buffer.str(), path.parent_path());
}

Scenario scenario_for(const SweepSpec& spec, double value, std::uint64_t seed) {
  auto doc = spec.base;
  switch (spec.parameter) {
    case SweepParameter::capacity_mean:
      doc.fleet_spec->capacity_mean = value;
      break;
    case SweepParameter::fleet_size:
      for (auto& pair : doc.fleet_spec->pairs)
        pair.count = static_cast<std::size_t>(
            std::llround(static_cast<double>(pair.count) * value));
      break;
    case SweepParameter::loading_weight:
      doc.loading_weight = value;
      break;
    case SweepParameter::degradation_weight:
      if (doc.fleet_spec) doc.fleet_spec->degradation_weight = value;
      break;
  }
  auto scenario = materialize(doc, seed);
  if (spec.parameter == SweepParameter::degradation_weight && doc.fleet)
    return scenario.with_degradation_weight(value);
  return scenario;
}

namespace {

SweepRow make_row(const Scenario& scenario, const BaselineResult& r,
                  double value, std::uint64_t seed) {
  SweepRow row;
  row.value = value;
  row.seed = seed;
  row.scheme = r.scheme;
  row.status = r.status;
  row.price = r.price;
  row.pso_utility = r.pso_utility;
  row.lcs_load = r.lcs_load;
  const auto& lcs = scenario.stations().lcs;
  row.saturated.assign(lcs.size(), false);
  if (r.feasible())
    for (std::size_t j = 0; j < lcs.size(); ++j)
      row.saturated[j] =
          r.lcs_load[j] >= lcs[j].demand_max() - kFeasibilityTolerance;
  return row;
}

}  // namespace

SweepSeries run_sweep(const SweepSpec& spec, unsigned threads) {
  validate(spec);
  SweepSeries series;
  series.parameter = spec.parameter;
  for (const auto& l : spec.base.stations.lcs) series.lcs_ids.push_back(l.id());

  const std::size_t per_point = spec.schemes.size();
  const std::size_t points = spec.values.size() * spec.seeds.size();
  series.rows.resize(points * per_point);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto work = [&] {
    for (std::size_t n = next++; n < points && !failed; n = next++) {
      const double value = spec.values[n / spec.seeds.size()];
      const auto seed = spec.seeds[n % spec.seeds.size()];
      try {
        const auto scenario = scenario_for(spec, value, seed);
        for (std::size_t s = 0; s < per_point; ++s)
          series.rows[n * per_point + s] = make_row(
              scenario, solve_scheme(scenario, spec.schemes[s], seed), value,
              seed);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };

  const unsigned workers = std::max(1u, threads);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return series;
}

std::vector<SweepAggregate> aggregate(const SweepSeries& series) {
  std::vector<SweepAggregate> cells;
  for (const auto& row : series.rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const auto& c) {
      return c.value == row.value && c.scheme == row.scheme;
    });
    if (it == cells.end()) {
      SweepAggregate cell;
      cell.value = row.value;
      cell.scheme = row.scheme;
      cell.mean_lcs_load.assign(series.lcs_ids.size(), 0.0);
      cell.saturated_fraction.assign(series.lcs_ids.size(), 0.0);
      cells.push_back(std::move(cell));
      it = std::prev(cells.end());
    }
    ++it->seeds;
    if (row.status != Feasibility::feasible) continue;
    ++it->feasible_seeds;
    it->mean_price += row.price;
    it->mean_pso_utility += row.pso_utility;
    for (std::size_t j = 0; j < series.lcs_ids.size(); ++j) {
      it->mean_lcs_load[j] += row.lcs_load[j];
      it->saturated_fraction[j] += row.saturated[j] ? 1.0 : 0.0;
    }
  }
  for (auto& cell : cells) {
    if (cell.feasible_seeds == 0) {
      cell.mean_price = cell.mean_pso_utility = std::nan("");
      continue;
    }
    const auto n = static_cast<double>(cell.feasible_seeds);
    cell.mean_price /= n;
    cell.mean_pso_utility /= n;
    for (auto& v : cell.mean_lcs_load) v /= n;
    for (auto& v : cell.saturated_fraction) v /= n;
  }
  return cells;
}

std::string format_sig9(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string sweep_csv(const SweepSeries& series) {
  std::string out = "parameter,value,seed,scheme,feasible,price,pso_utility";
  for (const auto& id : series.lcs_ids) out += ",load_" + id;
  out += ",saturated\n";
  const std::string name = parameter_name(series.parameter);
  for (const auto& row : series.rows) {
    const bool ok = row.status == Feasibility::feasible;
    out += name + ',' + format_sig9(row.value) + ',' + std::to_string(row.seed) +
           ',' + scheme_name(row.scheme) + ',' + (ok ? "1" : "0") + ',';
    if (ok) out += format_sig9(row.price);
    out += ',';
    if (ok) out += format_sig9(row.pso_utility);
    for (std::size_t j = 0; j < series.lcs_ids.size(); ++j) {
      out += ',';
      if (ok) out += format_sig9(row.lcs_load[j]);
    }
    out += ',';
    bool first = true;
    for (std::size_t j = 0; j < series.lcs_ids.size(); ++j) {
      if (!row.saturated[j]) continue;
      if (!first) out += ';';
      out += series.lcs_ids[j];
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string aggregate_csv(const SweepSeries& series,
                          const std::vector<SweepAggregate>& cells) {
  std::string out =
      "parameter,value,scheme,seeds,feasible_seeds,mean_price,mean_pso_utility";
  for (const auto& id : series.lcs_ids) out += ",mean_load_" + id;
  for (const auto& id : series.lcs_ids) out += ",saturated_" + id;
  out += '\n';
  const std::string name = parameter_name(series.parameter);
  for (const auto& cell : cells) {
    const bool ok = cell.feasible_seeds > 0;
    out += name + ',' + format_sig9(cell.value) + ',' + scheme_name(cell.scheme) +
           ',' + std::to_string(cell.seeds) + ',' +
           std::to_string(cell.feasible_seeds) + ',';
    if (ok) out += format_sig9(cell.mean_price);
    out += ',';
    if (ok) out += format_sig9(cell.mean_pso_utility);
    for (const double v : cell.mean_lcs_load) {
      out += ',';
      if (ok) out += format_sig9(v);
    }
    for (const double v : cell.saturated_fraction) {
      out += ',';
      if (ok) out += format_sig9(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mesgame
