#include "pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "runutil.hpp"
#include "taylorlp/errors.hpp"
#include "taylorlp/localproj.hpp"
#include "taylorlp/panel.hpp"
#include "taylorlp/shocks.hpp"
#include "taylorlp/svg.hpp"
#include "taylorlp/synthetic.hpp"
#include "taylorlp/version.hpp"

namespace tlp::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- inputs --

struct InputFile {
  std::string role;           // config | panel | regions | irf
  std::string path_as_given;  // echoed verbatim in the manifest
  fs::path abs;
  std::string bytes;
};

InputFile read_input(const std::string& role, const std::string& as_given, const fs::path& abs) {
  return {role, as_given, abs, slurp_file(abs)};
}

fs::path resolve_near(const fs::path& base_dir, const std::string& rel) {
  fs::path p(rel);
  return p.is_absolute() ? p : base_dir / p;
}

// ------------------------------------------------------------- config IO --

struct Context {
  RunRequest req;
  Ini ini;
  fs::path config_dir;
  std::vector<InputFile> inputs;  // config first
};

Context open_context(const RunRequest& req) {
  Context ctx;
  ctx.req = req;
  fs::path cfg(req.config_path);
  ctx.inputs.push_back(read_input("config", req.config_path, cfg));
  ctx.config_dir = cfg.has_parent_path() ? cfg.parent_path() : fs::path(".");
  std::istringstream in(ctx.inputs.front().bytes);
  ctx.ini = parse_ini(in, req.config_path);
  validate_schema(ctx.ini);
  return ctx;
}

panel::PanelDataset load_panel(Context& ctx) {
  if (!ctx.ini.has("input", "panel"))
    throw config_error("[input] panel is required for this command");
  const std::string given = ctx.ini.need("input", "panel");
  ctx.inputs.push_back(read_input("panel", given, resolve_near(ctx.config_dir, given)));
  std::istringstream in(ctx.inputs.back().bytes);
  return panel::PanelDataset::load_csv(in);
}

std::string command_line(const RunRequest& r) {
  std::string s = "taylorlp " + r.command + " --config " + r.config_path + " --out " + r.out_dir;
  if (r.seed) s += " --seed " + std::to_string(*r.seed);
  return s;
}

ordered_json config_echo(const Ini& ini) {
  ordered_json j = ordered_json::object();
  for (const auto& sec : ini.sections) {
    ordered_json body = ordered_json::object();
    for (const auto& [k, v] : sec.kv) body[k] = v;
    j[sec.name] = body;
  }
  return j;
}

ordered_json manifest_head(const Context& ctx) {
  ordered_json m = ordered_json::object();
  m["tool"] = "taylorlp";
  m["version"] = kVersion;
  m["command"] = command_line(ctx.req);
  m["config"] = config_echo(ctx.ini);
  m["inputs"] = nullptr;  // filled by finish(), keeps its slot here
  return m;
}

// Re-hash every input before promotion; a file that changed under us voids
// the run instead of promoting artifacts that no longer match their inputs.
void finish(Context& ctx, ordered_json& manifest, Stage& stage) {
  ordered_json inputs = ordered_json::object();
  for (const auto& f : ctx.inputs) {
    const std::string after = fnv1a64_hex(slurp_file(f.abs));
    const std::string before = fnv1a64_hex(f.bytes);
    if (after != before)
      throw io_error("input changed during run: " + f.path_as_given);
    ordered_json e = ordered_json::object();
    e["path"] = f.path_as_given;
    e["bytes"] = f.bytes.size();
    e["fnv1a64"] = before;
    e["fnv1a64_after"] = after;
    inputs[f.role] = e;
  }
  manifest["inputs"] = std::move(inputs);

  std::vector<std::string> arts = stage.artifacts();
  arts.push_back("manifest.json");
  std::sort(arts.begin(), arts.end());
  manifest["artifacts"] = arts;

  stage.add_text("manifest.json", manifest.dump(2) + "\n");
  stage.promote();
}

// ------------------------------------------------------------ estimation --

shocks::TaylorSpec taylor_spec_from(const Ini& ini) {
  shocks::TaylorSpec s;
  s.interest_rate = ini.get_or("taylor", "interest_rate", "i");
  s.gdp_growth = ini.get_or("taylor", "gdp_growth", "g");
  s.gdp_growth_forecast = ini.get_or("taylor", "gdp_growth_forecast", "g_forecast");
  s.inflation = ini.get_or("taylor", "inflation", "pi");
  s.inflation_forecast = ini.get_or("taylor", "inflation_forecast", "pi_forecast");
  s.reserves_change = ini.get_or("taylor", "reserves_change", "f");
  if (ini.has("taylor", "min_obs"))
    s.min_obs = to_int(ini.need("taylor", "min_obs"), "[taylor] min_obs");
  return s;
}

shocks::ShockKind shock_kind_from(const Ini& ini) {
  const std::string v = ini.get_or("taylor", "kind", "baseline");
  if (v == "baseline") return shocks::ShockKind::baseline;
  if (v == "forecast_error") return shocks::ShockKind::forecast_error;
  throw config_error("[taylor] kind must be baseline or forecast_error, got '" + v + "'");
}

int min_years_from(const Ini& ini) {
  int m = 5;
  if (ini.has("taylor", "min_years"))
    m = to_int(ini.need("taylor", "min_years"), "[taylor] min_years");
  if (m < 1) throw config_error("[taylor] min_years must be >= 1");
  return m;
}

struct ShockStage {
  shocks::ShockKind kind = shocks::ShockKind::baseline;
  int min_years = 5;
  shocks::ShockSeries series;             // after the min_years trim
  std::vector<shocks::SkipInfo> skipped;  // rule + scaling + trim, one entry per country
};

// Identification, then the usable-history trim: countries whose shock series
// is shorter than min_years are dropped the same way rule-stage skips are.
ShockStage run_shock_stage(const panel::PanelDataset& p, const shocks::TaylorSpec& spec,
                           shocks::ShockKind kind, int min_years) {
  ShockStage st;
  st.kind = kind;
  st.min_years = min_years;
  shocks::ShockResult res = shocks::identify_shocks(p, spec, kind);
  st.skipped = res.skipped;
  st.series = std::move(res.series);
  std::vector<shocks::CountryShocks> kept;
  kept.reserve(st.series.countries.size());
  for (auto& c : st.series.countries) {
    if (static_cast<int>(c.obs.size()) >= min_years) {
      kept.push_back(std::move(c));
    } else {
      st.skipped.push_back({c.country, "fewer than " + std::to_string(min_years) +
                                           " usable shock observations (" +
                                           std::to_string(c.obs.size()) + ")"});
    }
  }
  st.series.countries = std::move(kept);
  if (st.series.countries.empty())
    throw estimation_error("shock identification kept no countries");
  return st;
}

ordered_json shock_stage_json(const ShockStage& st) {
  ordered_json j = ordered_json::object();
  j["kind"] = st.kind == shocks::ShockKind::baseline ? "baseline" : "forecast_error";
  j["interpretation"] = st.series.interpretation;
  j["min_years"] = st.min_years;
  j["countries_used"] = static_cast<int>(st.series.countries.size());
  j["countries_skipped"] = static_cast<int>(st.skipped.size());
  j["total_obs"] = st.series.total_obs();
  return j;
}

// Every panel country shows up exactly once, used or skipped with a reason.
ordered_json country_accounting(const panel::PanelDataset& p, const ShockStage& st) {
  std::map<std::string, std::string> reason;
  for (const auto& s : st.skipped) reason[s.country] = s.reason;
  std::map<std::string, int> n_obs;
  for (const auto& c : st.series.countries) n_obs[c.country] = static_cast<int>(c.obs.size());
  ordered_json arr = ordered_json::array();
  for (const auto& g : p.groups()) {
    ordered_json e = ordered_json::object();
    e["country"] = g.id;
    auto used = n_obs.find(g.id);
    if (used != n_obs.end()) {
      e["status"] = "used";
      e["n_shock_obs"] = used->second;
    } else {
      e["status"] = "skipped";
      auto it = reason.find(g.id);
      e["reason"] = it != reason.end() ? it->second : std::string("not covered by shock stage");
    }
    arr.push_back(std::move(e));
  }
  return arr;
}

// ---------------------------------------------------------- LP batteries --

struct Outcome {
  std::string name;  // [outcome.<name>] tag, also the artifact stem
  std::string women, men, gap;
};

std::vector<Outcome> outcomes_from(const Ini& ini, const panel::PanelDataset& p) {
  std::vector<Outcome> out;
  for (const auto& sec : ini.sections) {
    if (sec.name.rfind("outcome.", 0) != 0) continue;
    Outcome o;
    o.name = sec.name.substr(8);
    o.women = ini.need(sec.name, "women");
    o.men = ini.need(sec.name, "men");
    o.gap = "__gap_" + o.name;
    for (const std::string* col : {&o.women, &o.men})
      if (!p.has_variable(*col))
        throw config_error("[" + sec.name + "]: column '" + *col + "' not in panel");
    out.push_back(std::move(o));
  }
  if (out.empty()) throw config_error("no [outcome.<name>] sections configured");
  return out;
}

panel::PanelDataset add_gap_columns(panel::PanelDataset p, const std::vector<Outcome>& outs) {
  for (const auto& o : outs) p = p.gender_gap(o.women, o.men, o.gap);
  return p;
}

lp::LPSpec lp_spec_from(const Ini& ini) {
  lp::LPSpec s;
  if (ini.has("lp", "horizons"))
    s.horizons = to_horizons(ini.need("lp", "horizons"), "[lp] horizons");
  if (ini.has("lp", "ci_level"))
    s.ci_level = to_double(ini.need("lp", "ci_level"), "[lp] ci_level");
  if (ini.has("lp", "lagged_outcome"))
    s.include_lagged_outcome = to_bool(ini.need("lp", "lagged_outcome"), "[lp] lagged_outcome");
  return s;
}

std::string growth_control_from(const Ini& ini, const shocks::TaylorSpec& ts) {
  return ini.get_or("lp", "growth_control", ts.gdp_growth);
}

std::vector<std::string> labor_conditions_from(const Ini& ini, const panel::PanelDataset& p) {
  if (!ini.has("lp", "labor_conditions"))
    throw config_error("[lp] labor_conditions must list the three condition columns");
  auto cols = to_list(ini.need("lp", "labor_conditions"), "[lp] labor_conditions");
  if (cols.size() != 3)
    throw config_error("[lp] labor_conditions needs exactly 3 columns, got " +
                       std::to_string(cols.size()));
  for (const auto& c : cols)
    if (!p.has_variable(c))
      throw config_error("[lp] labor_conditions column '" + c + "' not in panel");
  return cols;
}

const std::vector<std::string> kKnownAnalyses = {
    "baseline",   "with_growth", "with_labor_conditions", "alt_shocks",
    "regimed",    "sign_split",  "by_region"};

std::vector<std::string> run_selector(const Ini& ini) {
  std::vector<std::string> names = {"baseline"};
  if (ini.has("analysis", "run")) names = to_list(ini.need("analysis", "run"), "[analysis] run");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (std::find(kKnownAnalyses.begin(), kKnownAnalyses.end(), n) == kKnownAnalyses.end())
      throw config_error("[analysis] run: unknown analysis '" + n + "'");
    if (!seen.insert(n).second)
      throw config_error("[analysis] run lists '" + n + "' twice");
  }
  return names;
}

bool selected(const std::vector<std::string>& run, const std::string& name) {
  return std::find(run.begin(), run.end(), name) != run.end();
}

struct SeriesDef {
  std::string label;
  std::string column;
};

std::vector<SeriesDef> series_defs(const Outcome& o) {
  return {{"men", o.men}, {"women", o.women}, {"gap", o.gap}};
}

struct Battery {
  lp::IrfTable table;
  std::vector<lp::ImpulseResponse> irfs;
};

Battery plain_battery(const panel::PanelDataset& p, const shocks::ShockSeries& sh,
                      const lp::LPSpec& base, const Outcome& o) {
  Battery b;
  for (const auto& def : series_defs(o)) {
    lp::LPSpec s = base;
    s.outcome = def.column;
    lp::ImpulseResponse r = lp::estimate_lp(p, sh, s);
    r.label = def.label;
    b.irfs.push_back(std::move(r));
  }
  b.table = lp::build_irf_table(b.irfs);
  return b;
}

// Regime pairs come back (low, high) or (tightening, easing); the display
// order is low-then-high but easing-then-tightening.
Battery regimed_battery(const panel::PanelDataset& p, const shocks::ShockSeries& sh,
                        const lp::LPSpec& base, const lp::TransitionConfig& t,
                        const Outcome& o) {
  const bool easing_first = t.mode == lp::RegimeMode::sign_dummy;
  Battery b;
  for (const auto& def : series_defs(o)) {
    lp::LPSpec s = base;
    s.outcome = def.column;
    lp::RegimePair pair = lp::estimate_lp_regimed(p, sh, s, t);
    auto push = [&](lp::ImpulseResponse r) {
      r.label = def.label + "_" + r.label;
      b.irfs.push_back(std::move(r));
    };
    if (easing_first) {
      push(std::move(pair.second));
      push(std::move(pair.first));
    } else {
      push(std::move(pair.first));
      push(std::move(pair.second));
    }
  }
  b.table = lp::build_irf_table(b.irfs);
  return b;
}

ordered_json battery_json(const Battery& b, const std::vector<std::string>& files) {
  ordered_json j = ordered_json::object();
  j["files"] = files;
  ordered_json first = ordered_json::object();
  ordered_json absent = ordered_json::array();
  for (const auto& r : b.irfs) {
    if (!r.points.empty()) {
      const auto& e = r.points.front();
      ordered_json f = ordered_json::object();
      f["horizon"] = e.horizon;
      f["n_obs"] = e.n_obs;
      f["n_countries"] = e.n_countries;
      first[r.label] = std::move(f);
    }
    for (const auto& [h, reason] : r.absent) {
      ordered_json a = ordered_json::object();
      a["label"] = r.label;
      a["horizon"] = h;
      a["reason"] = reason;
      absent.push_back(std::move(a));
    }
  }
  j["first_horizon"] = std::move(first);
  if (!absent.empty()) j["absent"] = std::move(absent);
  return j;
}

std::vector<std::string> emit_battery(Stage& stage, const std::string& dir,
                                      const Outcome& o, const Battery& b,
                                      const std::string& title) {
  std::vector<std::string> files = {dir + "/" + o.name + ".csv", dir + "/" + o.name + ".json",
                                    dir + "/" + o.name + ".svg"};
  std::ostringstream csv;
  lp::write_irf_csv(csv, b.table);
  stage.add_text(files[0], csv.str());
  stage.add_text(files[1], lp::irf_table_json(b.table));
  stage.add_text(files[2], svg::render_irf_svg(b.table, title));
  return files;
}

// Outcome subset for the regime/sign/region analyses: an explicit list, or
// an explicit opt-in to every configured outcome.
std::vector<Outcome> outcome_subset(const Ini& ini, const std::string& section,
                                    const std::vector<Outcome>& all) {
  if (ini.has(section, "outcomes")) {
    auto names = to_list(ini.need(section, "outcomes"), "[" + section + "] outcomes");
    std::vector<Outcome> out;
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second)
        throw config_error("[" + section + "] outcomes lists '" + n + "' twice");
      auto it = std::find_if(all.begin(), all.end(),
                             [&](const Outcome& o) { return o.name == n; });
      if (it == all.end())
        throw config_error("[" + section + "] outcomes: no [outcome." + n + "] section");
      out.push_back(*it);
    }
    return out;
  }
  if (ini.has(section, "allow_all_outcomes") &&
      to_bool(ini.need(section, "allow_all_outcomes"), "[" + section + "] allow_all_outcomes"))
    return all;
  throw config_error("[" + section + "] must name outcomes = ... or set allow_all_outcomes = true");
}

std::map<std::string, double> country_state_means(const panel::PanelDataset& p,
                                                  const std::string& col) {
  if (!p.has_variable(col))
    throw config_error("state column '" + col + "' not in panel");
  const auto& v = p.column(col);
  std::map<std::string, double> m;
  for (const auto& g : p.groups()) {
    double sum = 0.0;
    int n = 0;
    for (int r = g.begin; r < g.end; ++r)
      if (!panel::is_missing(v[r])) {
        sum += v[r];
        ++n;
      }
    if (n > 0) m[g.id] = sum / n;
  }
  return m;
}

// --------------------------------------------------------------- shocks ---

void cmd_shocks(Context& ctx) {
  panel::PanelDataset p = load_panel(ctx);
  shocks::TaylorSpec spec = taylor_spec_from(ctx.ini);
  ShockStage st = run_shock_stage(p, spec, shock_kind_from(ctx.ini), min_years_from(ctx.ini));

  Stage stage(ctx.req.out_dir);
  std::ostringstream csv;
  shocks::write_shock_csv(csv, st.series);
  stage.add_text("shocks.csv", csv.str());

  std::vector<shocks::PooledTaylor> pooled;
  pooled.push_back(shocks::pooled_taylor_fe(p, spec, false));
  pooled.push_back(shocks::pooled_taylor_fe(p, spec, true));
  stage.add_text("rule_table.txt", shocks::format_rule_table(pooled));

  ordered_json m = manifest_head(ctx);
  m["countries"] = country_accounting(p, st);
  m["shock_stage"] = shock_stage_json(st);
  finish(ctx, m, stage);
}

// ------------------------------------------------------------------- lp ---

void cmd_lp(Context& ctx) {
  panel::PanelDataset raw = load_panel(ctx);
  std::vector<Outcome> outcomes = outcomes_from(ctx.ini, raw);
  panel::PanelDataset p = add_gap_columns(raw, outcomes);

  shocks::TaylorSpec tspec = taylor_spec_from(ctx.ini);
  const int min_years = min_years_from(ctx.ini);
  const std::string growth = growth_control_from(ctx.ini, tspec);
  lp::LPSpec base = lp_spec_from(ctx.ini);

  struct Def {
    std::string name;
    shocks::ShockKind kind;
    bool growth, conditions;
  };
  const std::vector<Def> defs = {
      {"baseline", shocks::ShockKind::baseline, false, false},
      {"with_growth", shocks::ShockKind::baseline, true, false},
      {"with_labor_conditions", shocks::ShockKind::baseline, true, true},
      {"alt_shocks", shocks::ShockKind::forecast_error, true, false},
  };
  const std::vector<std::string> run = run_selector(ctx.ini);
  std::vector<Def> todo;
  for (const auto& d : defs)
    if (selected(run, d.name)) todo.push_back(d);
  if (todo.empty())
    throw config_error(
        "[analysis] run selects none of baseline, with_growth, with_labor_conditions, "
        "alt_shocks");

  const bool need_base = std::any_of(todo.begin(), todo.end(), [](const Def& d) {
    return d.kind == shocks::ShockKind::baseline;
  });
  const bool need_alt = std::any_of(todo.begin(), todo.end(), [](const Def& d) {
    return d.kind == shocks::ShockKind::forecast_error;
  });
  std::optional<ShockStage> st_base, st_alt;
  if (need_base) st_base = run_shock_stage(p, tspec, shocks::ShockKind::baseline, min_years);
  if (need_alt) st_alt = run_shock_stage(p, tspec, shocks::ShockKind::forecast_error, min_years);
  const ShockStage& primary = need_base ? *st_base : *st_alt;

  std::vector<std::string> conditions;
  if (std::any_of(todo.begin(), todo.end(), [](const Def& d) { return d.conditions; }))
    conditions = labor_conditions_from(ctx.ini, p);

  Stage stage(ctx.req.out_dir);
  ordered_json analyses = ordered_json::object();
  for (const auto& d : todo) {
    const ShockStage& st = d.kind == shocks::ShockKind::baseline ? *st_base : *st_alt;
    lp::LPSpec spec = base;
    if (d.growth) spec.controls.push_back(growth);
    if (d.conditions)
      spec.controls.insert(spec.controls.end(), conditions.begin(), conditions.end());

    ordered_json a = ordered_json::object();
    a["shock_kind"] = d.kind == shocks::ShockKind::baseline ? "baseline" : "forecast_error";
    a["controls"] = spec.controls;
    if (d.kind == shocks::ShockKind::forecast_error) a["shock_stage"] = shock_stage_json(st);
    if (d.conditions) {
      int complete = 0;
      std::vector<const std::vector<double>*> cols;
      for (const auto& c : conditions) cols.push_back(&p.column(c));
      for (int r = 0; r < p.n_rows(); ++r) {
        bool all = true;
        for (const auto* col : cols)
          if (panel::is_missing((*col)[r])) {
            all = false;
            break;
          }
        if (all) ++complete;
      }
      ordered_json sample = ordered_json::object();
      sample["condition_complete_rows"] = complete;
      sample["panel_rows"] = p.n_rows();
      a["sample"] = std::move(sample);
    }

    ordered_json per_outcome = ordered_json::object();
    for (const auto& o : outcomes) {
      Battery b = plain_battery(p, st.series, spec, o);
      auto files = emit_battery(stage, d.name, o, b, o.name + " - " + d.name);
      per_outcome[o.name] = battery_json(b, files);
    }
    a["outcomes"] = std::move(per_outcome);
    analyses[d.name] = std::move(a);
  }

  ordered_json m = manifest_head(ctx);
  m["countries"] = country_accounting(p, primary);
  m["shock_stage"] = shock_stage_json(primary);
  m["analyses"] = std::move(analyses);
  finish(ctx, m, stage);
}

// --------------------------------------------------- regimed / signsplit ---

void cmd_regimed_or_signsplit(Context& ctx, lp::RegimeMode mode) {
  const std::string analysis = mode == lp::RegimeMode::smooth_state ? "regimed" : "sign_split";
  const std::string section = mode == lp::RegimeMode::smooth_state ? "regimed" : "signsplit";
  const std::vector<std::string> run = run_selector(ctx.ini);
  if (!selected(run, analysis))
    throw config_error("[analysis] run must include '" + analysis + "' for this command");

  panel::PanelDataset raw = load_panel(ctx);
  std::vector<Outcome> all = outcomes_from(ctx.ini, raw);
  panel::PanelDataset p = add_gap_columns(raw, all);
  std::vector<Outcome> outcomes = outcome_subset(ctx.ini, section, all);

  shocks::TaylorSpec tspec = taylor_spec_from(ctx.ini);
  ShockStage st = run_shock_stage(p, tspec, shocks::ShockKind::baseline, min_years_from(ctx.ini));

  lp::LPSpec spec = lp_spec_from(ctx.ini);
  spec.controls.push_back(growth_control_from(ctx.ini, tspec));

  lp::TransitionConfig t;
  t.mode = mode;
  std::string state_col;
  if (mode == lp::RegimeMode::smooth_state) {
    if (ctx.ini.has("regimed", "eta"))
      t.eta = to_double(ctx.ini.need("regimed", "eta"), "[regimed] eta");
    state_col = ctx.ini.get_or("regimed", "state", tspec.gdp_growth);
    t.state_values = country_state_means(p, state_col);
  }

  Stage stage(ctx.req.out_dir);
  ordered_json per_outcome = ordered_json::object();
  for (const auto& o : outcomes) {
    Battery b = regimed_battery(p, st.series, spec, t, o);
    auto files = emit_battery(stage, analysis, o, b, o.name + " - " + analysis);
    per_outcome[o.name] = battery_json(b, files);
  }

  ordered_json a = ordered_json::object();
  a["shock_kind"] = "baseline";
  a["controls"] = spec.controls;
  if (mode == lp::RegimeMode::smooth_state) {
    a["eta"] = t.eta;
    a["state"] = state_col;
  }
  a["outcomes"] = std::move(per_outcome);

  ordered_json m = manifest_head(ctx);
  m["countries"] = country_accounting(p, st);
  m["shock_stage"] = shock_stage_json(st);
  ordered_json analyses = ordered_json::object();
  analyses[analysis] = std::move(a);
  m["analyses"] = std::move(analyses);
  finish(ctx, m, stage);
}

// -------------------------------------------------------------- regions ---

void cmd_regions(Context& ctx) {
  const std::vector<std::string> run = run_selector(ctx.ini);
  if (!selected(run, "by_region"))
    throw config_error("[analysis] run must include 'by_region' for this command");
  if (!ctx.ini.has("input", "regions"))
    throw config_error("[input] regions is required for the regions command");

  panel::PanelDataset raw = load_panel(ctx);
  const std::string given = ctx.ini.need("input", "regions");
  ctx.inputs.push_back(read_input("regions", given, resolve_near(ctx.config_dir, given)));
  std::map<std::string, panel::Region> rmap;
  {
    std::istringstream in(ctx.inputs.back().bytes);
    rmap = panel::load_regions(in);
  }

  std::vector<Outcome> all = outcomes_from(ctx.ini, raw);
  panel::PanelDataset p = add_gap_columns(raw, all);
  p.set_regions(rmap);
  std::vector<Outcome> outcomes = outcome_subset(ctx.ini, "regions", all);

  shocks::TaylorSpec tspec = taylor_spec_from(ctx.ini);
  ShockStage st = run_shock_stage(p, tspec, shocks::ShockKind::baseline, min_years_from(ctx.ini));

  lp::LPSpec spec = lp_spec_from(ctx.ini);
  spec.controls.push_back(growth_control_from(ctx.ini, tspec));

  const panel::Region order[] = {panel::Region::EDA, panel::Region::EDE, panel::Region::LAC,
                                 panel::Region::SSA};
  std::map<panel::Region, int> n_by_region;
  for (const auto& g : p.groups()) {
    auto it = rmap.find(g.id);
    if (it != rmap.end()) ++n_by_region[it->second];
  }

  Stage stage(ctx.req.out_dir);
  ordered_json region_counts = ordered_json::object();
  std::vector<std::pair<panel::Region, panel::PanelDataset>> subsets;
  for (panel::Region r : order) {
    const int n = n_by_region.count(r) ? n_by_region[r] : 0;
    region_counts[panel::region_code(r)] = n;
    if (n > 0) subsets.emplace_back(r, p.subset_region(r));
  }
  if (subsets.empty()) throw data_error("no panel country carries a region assignment");

  ordered_json per_outcome = ordered_json::object();
  for (const auto& o : outcomes) {
    std::vector<lp::ImpulseResponse> irfs;
    for (const auto& [r, sub] : subsets) {
      for (const auto& def : series_defs(o)) {
        lp::LPSpec s = spec;
        s.outcome = def.column;
        lp::ImpulseResponse est = lp::estimate_lp(sub, st.series, s);
        est.label = std::string(panel::region_code(r)) + "_" + def.label;
        irfs.push_back(std::move(est));
      }
    }
    Battery b;
    b.irfs = std::move(irfs);
    b.table = lp::build_irf_table(b.irfs);
    auto files = emit_battery(stage, "by_region", o, b, o.name + " - by_region");
    per_outcome[o.name] = battery_json(b, files);
  }

  ordered_json a = ordered_json::object();
  a["shock_kind"] = "baseline";
  a["controls"] = spec.controls;
  a["region_countries"] = std::move(region_counts);
  a["outcomes"] = std::move(per_outcome);

  ordered_json m = manifest_head(ctx);
  m["countries"] = country_accounting(p, st);
  m["shock_stage"] = shock_stage_json(st);
  ordered_json analyses = ordered_json::object();
  analyses["by_region"] = std::move(a);
  m["analyses"] = std::move(analyses);
  finish(ctx, m, stage);
}

// ---------------------------------------------------------------- synth ---

synth::DgpConfig dgp_from(const Ini& ini, const std::optional<std::uint64_t>& seed) {
  synth::DgpConfig c;
  if (ini.has("dgp", "n_countries"))
    c.n_countries = to_int(ini.need("dgp", "n_countries"), "[dgp] n_countries");
  if (ini.has("dgp", "n_years"))
    c.n_years = to_int(ini.need("dgp", "n_years"), "[dgp] n_years");
  if (ini.has("dgp", "rule_noise_sd"))
    c.rule_noise_sd = to_double(ini.need("dgp", "rule_noise_sd"), "[dgp] rule_noise_sd");
  if (ini.has("dgp", "outcome_noise_sd"))
    c.outcome_noise_sd = to_double(ini.need("dgp", "outcome_noise_sd"), "[dgp] outcome_noise_sd");
  if (ini.has("dgp", "missing_rate"))
    c.missing_rate = to_double(ini.need("dgp", "missing_rate"), "[dgp] missing_rate");
  if (ini.has("dgp", "true_irf"))
    c.true_irf = to_irf_map(ini.need("dgp", "true_irf"), "[dgp] true_irf");
  if (ini.has("dgp", "taylor_alphas")) {
    auto parts = to_list(ini.need("dgp", "taylor_alphas"), "[dgp] taylor_alphas");
    if (parts.size() != c.taylor_alphas.size())
      throw config_error("[dgp] taylor_alphas needs 7 values, got " +
                         std::to_string(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
      c.taylor_alphas[i] = to_double(parts[i], "[dgp] taylor_alphas");
  }
  const bool lo = ini.has("dgp", "regime_beta_low");
  const bool hi = ini.has("dgp", "regime_beta_high");
  if (lo != hi)
    throw config_error("[dgp] regime_beta_low and regime_beta_high must be set together");
  if (ini.has("dgp", "state_gap") && !lo)
    throw config_error("[dgp] state_gap needs regime_beta_low/high");
  if (lo) {
    synth::RegimeSplit rs;
    rs.beta_low = to_irf_map(ini.need("dgp", "regime_beta_low"), "[dgp] regime_beta_low");
    rs.beta_high = to_irf_map(ini.need("dgp", "regime_beta_high"), "[dgp] regime_beta_high");
    if (ini.has("dgp", "state_gap"))
      rs.state_gap = to_double(ini.need("dgp", "state_gap"), "[dgp] state_gap");
    c.regime_split = std::move(rs);
  }
  if (ini.has("dgp", "seed")) c.seed = to_u64(ini.need("dgp", "seed"), "[dgp] seed");
  if (seed) c.seed = *seed;
  c.validate();
  return c;
}

void cmd_synth(Context& ctx) {
  synth::DgpConfig cfg = dgp_from(ctx.ini, ctx.req.seed);
  auto [p, truth] = synth::generate_panel(cfg);

  Stage stage(ctx.req.out_dir);
  stage.add_text("panel.csv", p.serialize());
  stage.add_text("truth.json", truth.to_json(cfg));

  static const char* kCodes[] = {"EDA", "EDE", "LAC", "SSA"};
  std::string regions = "country,region\n";
  int i = 0;
  for (const auto& g : p.groups()) regions += g.id + "," + kCodes[i++ % 4] + "\n";
  stage.add_text("regions.csv", regions);

  ordered_json gen = ordered_json::object();
  gen["n_countries"] = cfg.n_countries;
  gen["n_years"] = cfg.n_years;
  gen["seed"] = cfg.seed;
  gen["n_rows"] = p.n_rows();
  gen["shock_obs"] = truth.shock_series().total_obs();

  ordered_json m = manifest_head(ctx);
  m["generator"] = std::move(gen);
  finish(ctx, m, stage);
}

// ----------------------------------------------------------------- plot ---

void cmd_plot(Context& ctx) {
  if (!ctx.ini.has("plot", "input"))
    throw config_error("[plot] input is required for the plot command");
  const std::string given = ctx.ini.need("plot", "input");
  ctx.inputs.push_back(read_input("irf", given, resolve_near(ctx.config_dir, given)));
  lp::IrfTable table;
  {
    std::istringstream in(ctx.inputs.back().bytes);
    table = lp::read_irf_csv(in);
  }
  const std::string stem = fs::path(given).stem().string();
  const std::string title = ctx.ini.get_or("plot", "title", stem);

  Stage stage(ctx.req.out_dir);
  stage.add_text(stem + ".svg", svg::render_irf_svg(table, title));

  std::set<std::string> labels;
  for (const auto& r : table.rows) labels.insert(r.label);
  ordered_json pj = ordered_json::object();
  pj["input"] = given;
  pj["rows"] = static_cast<int>(table.rows.size());
  pj["labels"] = static_cast<int>(labels.size());
  pj["title"] = title;

  ordered_json m = manifest_head(ctx);
  m["plot"] = std::move(pj);
  finish(ctx, m, stage);
}

}  // namespace

void run(const RunRequest& req) {
  Context ctx = open_context(req);
  if (req.command == "shocks") return cmd_shocks(ctx);
  if (req.command == "lp") return cmd_lp(ctx);
  if (req.command == "regimed") return cmd_regimed_or_signsplit(ctx, lp::RegimeMode::smooth_state);
  if (req.command == "signsplit") return cmd_regimed_or_signsplit(ctx, lp::RegimeMode::sign_dummy);
  if (req.command == "regions") return cmd_regions(ctx);
  if (req.command == "synth") return cmd_synth(ctx);
  if (req.command == "plot") return cmd_plot(ctx);
  throw config_error("unknown command: " + req.command);
}

}  // namespace tlp::cli
