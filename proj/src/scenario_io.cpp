#include "mesgame/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mesgame {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string_view> tokens;
};

std::string at_line(std::size_t number) {
  return " (line " + std::to_string(number) + ")";
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                 text[pos] == '\r' || text[pos] == ','))
      ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' &&
           text[pos] != '\r' && text[pos] != ',')
      ++pos;
    if (pos > start) tokens.push_back(text.substr(start, pos - start));
  }
  return tokens;
}

double parse_number(std::string_view token, const std::string& field,
                    std::size_t line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ScenarioError(field, "expected a number, got '" + std::string(token) +
                                   "'" + at_line(line));
  return value;
}

std::uint64_t parse_count(std::string_view token, const std::string& field,
                          std::size_t line) {
  std::uint64_t value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ScenarioError(field, "expected a nonnegative integer, got '" +
                                   std::string(token) + "'" + at_line(line));
  return value;
}

/// Splits `key = v1 v2 ...` into key and value tokens.
std::pair<std::string_view, std::vector<std::string_view>> key_value(
    const Line& line, const std::string& section) {
  const auto& t = line.tokens;
  if (t.size() < 3 || t[1] != "=")
    throw ScenarioError(section, "expected 'key = value'" + at_line(line.number));
  return {t[0], {t.begin() + 2, t.end()}};
}

void expect_columns(const Line& line, std::size_t n, const std::string& field) {
  if (line.tokens.size() != n)
    throw ScenarioError(field, "expected " + std::to_string(n) +
                                   " columns, got " +
                                   std::to_string(line.tokens.size()) +
                                   at_line(line.number));
}

double single(const std::vector<std::string_view>& values,
              const std::string& field, std::size_t line) {
  if (values.size() != 1)
    throw ScenarioError(field, "expected one value" + at_line(line));
  return parse_number(values[0], field, line);
}

struct RawFleetRow {
  MesAgent agent;
  bool uses_curve = false;
  std::size_t line = 0;
};

}  // namespace

ScenarioDocument parse_scenario_document(std::string_view text) {
  ScenarioDocument doc;
  std::vector<RawFleetRow> fleet_rows;
  bool have_fleet = false;
  bool have_weights = false;
  std::string section;
  std::size_t number = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    Line line{number, split(raw)};
    if (line.tokens.empty()) continue;

    const auto head = line.tokens[0];
    if (head.front() == '[') {
      if (line.tokens.size() != 1 || head.back() != ']')
        throw ScenarioError("document", "malformed section header" +
                                            at_line(number));
      section = std::string(head.substr(1, head.size() - 2));
      if (section == "fleet") have_fleet = true;
      if (section == "fleet_spec" && !doc.fleet_spec) doc.fleet_spec.emplace();
      if (section == "weights") have_weights = true;
      if (section != "weights" && section != "rcs" && section != "lcs" &&
          section != "fleet" && section != "fleet_spec" &&
          section != "degradation")
        throw ScenarioError("document",
                            "unknown section [" + section + "]" + at_line(number));
      continue;
    }

    if (section.empty()) {
      throw ScenarioError("document", "content before first section" +
                                          at_line(number));
    } else if (section == "weights") {
      const auto [key, values] = key_value(line, "weights");
      if (key != "loading_weight")
        throw ScenarioError("weights." + std::string(key),
                            "unknown key" + at_line(number));
      doc.loading_weight = single(values, "weights.loading_weight", number);
    } else if (section == "rcs") {
      const std::string field = "rcs[" + std::string(head) + "]";
      expect_columns(line, 3, field);
      doc.stations.rcs.push_back(
          {std::string(head),
           parse_number(line.tokens[1], field + ".surplus_energy", number),
           parse_number(line.tokens[2], field + ".charge_power", number)});
    } else if (section == "lcs") {
      const std::string field = "lcs[" + std::string(head) + "]";
      expect_columns(line, 4, field);
      doc.stations.lcs.emplace_back(
          std::string(head),
          parse_number(line.tokens[1], field + ".demand_min", number),
          parse_number(line.tokens[2], field + ".demand_max", number),
          parse_number(line.tokens[3], field + ".discharge_power", number));
    } else if (section == "fleet") {
      const std::string field = "fleet[" + std::string(head) + "]";
      expect_columns(line, 10, field);
      RawFleetRow row;
      row.line = number;
      auto& a = row.agent;
      const auto& t = line.tokens;
      a.id = std::string(t[0]);
      a.rcs_id = std::string(t[1]);
      a.lcs_id = std::string(t[2]);
      a.battery_capacity = parse_number(t[3], field + ".battery_capacity", number);
      a.initial_soc = parse_number(t[4], field + ".initial_soc", number);
      a.time_weight = parse_number(t[5], field + ".time_weight", number);
      a.degradation_weight =
          parse_number(t[6], field + ".degradation_weight", number);
      a.dod_quadratic = parse_number(t[7], field + ".dod_quadratic", number);
      a.dod_linear = parse_number(t[8], field + ".dod_linear", number);
      if (t[9] == "curve")
        row.uses_curve = true;
      else
        a.power_degradation =
            parse_number(t[9], field + ".power_degradation", number);
      fleet_rows.push_back(std::move(row));
    } else if (section == "fleet_spec") {
      auto& spec = *doc.fleet_spec;
      const auto [key, values] = key_value(line, "fleet_spec");
      const std::string field = "fleet_spec." + std::string(key);
      if (key == "pair") {
        if (values.size() != 3)
          throw ScenarioError(field, "expected 'pair = RCS LCS count'" +
                                         at_line(number));
        spec.pairs.push_back({std::string(values[0]), std::string(values[1]),
                              static_cast<std::size_t>(
                                  parse_count(values[2], field, number))});
      } else if (key == "seed") {
        if (values.size() != 1)
          throw ScenarioError(field, "expected one value" + at_line(number));
        doc.seed = parse_count(values[0], field, number);
      } else if (key == "power_degradation" && values.size() == 1 &&
                 values[0] == "curve") {
        spec.power_degradation.reset();
      } else {
        const double v = single(values, field, number);
        if (key == "capacity_mean") spec.capacity_mean = v;
        else if (key == "capacity_sd") spec.capacity_sd = v;
        else if (key == "battery_mean") spec.battery_mean = v;
        else if (key == "battery_sd") spec.battery_sd = v;
        else if (key == "time_weight") spec.time_weight = v;
        else if (key == "degradation_weight") spec.degradation_weight = v;
        else if (key == "dod_quadratic") spec.dod_quadratic = v;
        else if (key == "dod_linear") spec.dod_linear = v;
        else if (key == "power_degradation") spec.power_degradation = v;
        else throw ScenarioError(field, "unknown key" + at_line(number));
      }
    } else if (section == "degradation") {
      const auto [key, values] = key_value(line, "degradation");
      if (key != "beta" || values.size() != 4)
        throw ScenarioError("degradation.beta",
                            "expected 'beta = b1 b2 b3 b4'" + at_line(number));
      doc.curve = DegradationCurve{
          parse_number(values[0], "degradation.beta", number),
          parse_number(values[1], "degradation.beta", number),
          parse_number(values[2], "degradation.beta", number),
          parse_number(values[3], "degradation.beta", number)};
    }
  }

  if (!have_weights)
    throw ScenarioError("weights", "missing [weights] section");
  if (have_fleet && doc.fleet_spec)
    throw ScenarioError("fleet", "[fleet] and [fleet_spec] are exclusive");
  if (!have_fleet && !doc.fleet_spec)
    throw ScenarioError("fleet", "missing [fleet] or [fleet_spec] section");

  if (have_fleet) {
    std::vector<MesAgent> fleet;
    fleet.reserve(fleet_rows.size());
    for (auto& row : fleet_rows) {
      if (row.uses_curve) {
        if (!doc.curve)
          throw ScenarioError("fleet[" + row.agent.id + "].power_degradation",
                              "'curve' needs a [degradation] section" +
                                  at_line(row.line));
        const auto j = doc.stations.find_lcs(row.agent.lcs_id);
        if (!j)
          throw ScenarioError("fleet[" + row.agent.id + "].lcs",
                              "unknown LCS '" + row.agent.lcs_id + "'");
        row.agent.power_degradation = power_degradation_factor(
            *doc.curve, doc.stations.lcs[*j].discharge_power());
      }
      fleet.push_back(std::move(row.agent));
    }
    doc.fleet = std::move(fleet);
  }
  if (doc.curve)
    for (const auto& l : doc.stations.lcs)
      power_degradation_factor(*doc.curve, l.discharge_power());
  return doc;
}

ScenarioDocument read_scenario_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ScenarioError("file", "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_document(buffer.str());
}

Scenario materialize(const ScenarioDocument& doc,
                     std::optional<std::uint64_t> seed) {
  if (doc.fleet) return Scenario(doc.stations, *doc.fleet, doc.loading_weight);
  auto fleet = generate_fleet(*doc.fleet_spec, seed.value_or(doc.seed),
                              doc.curve, &doc.stations);
  return Scenario(doc.stations, std::move(fleet), doc.loading_weight);
}

Scenario load_scenario(std::string_view text) {
  return materialize(parse_scenario_document(text));
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  return materialize(read_scenario_document(path));
}

std::string format_exact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string serialize_scenario(const Scenario& scenario) {
  std::string out;
  const auto num = [&out](double v) {
    out += ' ';
    out += format_exact(v);
  };
  out += "[weights]\nloading_weight = " +
         format_exact(scenario.loading_weight()) + "\n\n";
  out += "[rcs]\n# id surplus_energy charge_power\n";
  for (const auto& r : scenario.stations().rcs) {
    out += r.id;
    num(r.surplus_energy);
    num(r.charge_power);
    out += '\n';
  }
  out += "\n[lcs]\n# id demand_min demand_max discharge_power\n";
  for (const auto& l : scenario.stations().lcs) {
    out += l.id();
    num(l.demand_min());
    num(l.demand_max());
    num(l.discharge_power());
    out += '\n';
  }
  out +=
      "\n[fleet]\n# id rcs lcs battery_capacity initial_soc time_weight "
      "degradation_weight dod_quadratic dod_linear power_degradation\n";
  for (const auto& a : scenario.fleet()) {
    out += a.id + ' ' + a.rcs_id + ' ' + a.lcs_id;
    num(a.battery_capacity);
    num(a.initial_soc);
    num(a.time_weight);
    num(a.degradation_weight);
    num(a.dod_quadratic);
    num(a.dod_linear);
    num(a.power_degradation);
    out += '\n';
  }
  return out;
}

}  // namespace mesgame
