#pragma once

// CLI verbs as pure functions from a RunConfig to a set of staged files.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "scmref/config.hpp"
#include "scmref/design_explorer.hpp"
#include "scmref/lut.hpp"
#include "scmref/methodology.hpp"
#include "scmref/metrics.hpp"
#include "scmref/reference_model.hpp"
#include "scmref/report.hpp"
#include "scmref/sizing.hpp"
#include "scmref/smallsignal.hpp"
#include "scmref/variability.hpp"

namespace scmref::commands {

using report::CsvTable;
using report::fmt;
using report::json;
using report::num;
using report::StagedOutput;

/// S_2 / N that makes I_REF(25 degC) equal the design target.
inline double s2_over_n_for_target(const DesignPoint& d, const TechProfile& tech) {
  const Temperature t = reference_temperature();
  return d.i_ref_target / (acm::isq_at(tech, t) * solve_if2(d, tech, t));
}

inline json operating_point_json(const OperatingPoint& op) {
  return {{"t_c", num(op.temperature.celsius())},
          {"i_f2", num(op.i_f2)},
          {"i_f1", num(op.i_f1)},
          {"i_r1", num(op.i_r1)},
          {"beta", num(op.beta)},
          {"v_x_v", num(op.v_x)},
          {"i_ref_a", num(op.i_ref)},
          {"s_iref_per_v", num(op.s_iref)},
          {"s_iref_pct_per_mv", num(per_volt_to_pct_per_mv(op.s_iref))},
          {"delta_vt_v", num(op.delta_vt)}};
}

inline StagedOutput cmd_solve(const config::RunConfig& cfg) {
  const auto& d = cfg.design;
  const double s2n = s2_over_n_for_target(d, cfg.tech);
  SweepOptions sopt;
  sopt.leak = cfg.leakage;
  const TemperatureSweep sweep = temperature_sweep(d, cfg.tech, cfg.grid, s2n, sopt);
  const OperatingPoint op25 = operating_point(d, cfg.tech, reference_temperature(), s2n);

  // Pure T^(2-m) law over the same grid, the PTAT-mode reference.
  BoxSeries law;
  for (const auto& t : cfg.grid) {
    law.axis.push_back(t.celsius());
    law.values.push_back(acm::isq_at(cfg.tech, t));
  }

  json doc;
  doc["command"] = "solve";
  doc["ptat_mode"] = sweep.ptat_mode;
  doc["tc_ppm_per_c"] = num(sweep.tc_ppm);
  doc["ptat_law_tc_ppm_per_c"] = num(box_tc(law));
  doc["s2_over_n"] = num(s2n);
  doc["reference_25c"] = operating_point_json(op25);
  doc["leakage_applied"] = cfg.leakage.has_value();

  json normalized = json::array();
  for (const auto& p : sweep.points) {
    normalized.push_back({{"t_c", num(p.temperature.celsius())}, {"i_ref_norm", num(p.i_ref / op25.i_ref)}});
  }
  doc["i_ref_normalized_25c"] = normalized;

  json points = json::array();
  if (cfg.solve_temperatures_c.empty()) {
    for (const auto& p : sweep.points) points.push_back(operating_point_json(p));
  } else {
    for (double c : cfg.solve_temperatures_c) {
      points.push_back(operating_point_json(operating_point(d, cfg.tech, Temperature::celsius(c), s2n)));
    }
  }

  StagedOutput out(cfg.output_dir);
  if (cfg.format == "csv") {
    CsvTable csv({"t_c", "i_f2", "beta", "v_x_v", "i_ref_a", "s_iref_per_v"});
    for (const auto& p : sweep.points) {
      csv.add_numbers({p.temperature.celsius(), p.i_f2, p.beta, p.v_x, p.i_ref, p.s_iref});
    }
    out.add("tempsweep.csv", csv.str());
    out.add_json("solve_summary.json", doc);
  } else {
    doc["points"] = points;
    out.add_json("solve.json", doc);
  }
  return out;
}

/// File tag for an offset, e.g. 0.02 V -> "dvt20mV".
inline std::string dvt_tag(double dvt) { return "dvt" + fmt(dvt * 1e3) + "mV"; }

inline StagedOutput cmd_valley(const config::RunConfig& cfg) {
  const auto& v = cfg.valley;
  if (!(v.alphas.start > 1.0)) throw InputError("config: valley alphas must be > 1");
  const auto alphas = linspace(v.alphas.start, v.alphas.stop, v.alphas.count);
  ValleyOptions vopt;
  vopt.k_lo = v.k_lo;
  vopt.k_hi = v.k_hi;

  auto dvts = v.delta_vts;
  std::sort(dvts.begin(), dvts.end());

  StagedOutput out(cfg.output_dir);
  json fits = json::array();
  json doc;
  doc["command"] = "valley";
  std::vector<ValleyFit> fit_list;
  bool all_fitted = true;
  for (double dvt : dvts) {
    const auto pts = trace_valley(cfg.tech, dvt, alphas, cfg.grid, vopt);
    std::vector<ValleyPoint> interior;
    CsvTable csv({"alpha", "k_ptat_opt", "tc_ppm_per_c", "s_iref_pct_per_mv"});
    json jpts = json::array();
    for (const auto& p : pts) {
      csv.add_numbers({p.alpha, p.k_ptat_opt, p.tc, per_volt_to_pct_per_mv(p.s_iref)});
      jpts.push_back({{"alpha", num(p.alpha)},
                      {"k_ptat_opt", num(p.k_ptat_opt)},
                      {"tc_ppm_per_c", num(p.tc)},
                      {"s_iref_pct_per_mv", num(per_volt_to_pct_per_mv(p.s_iref))},
                      {"boundary", p.boundary}});
      if (!p.boundary) interior.push_back(p);
    }
    json jf{{"delta_vt_v", num(dvt)}, {"points_used", interior.size()}};
    if (interior.size() >= 3) {
      const ValleyFit f = fit_valley(interior);
      fit_list.push_back(f);
      jf["slope"] = num(f.slope);
      jf["offset"] = num(f.offset);
      jf["r_squared"] = num(f.r_squared);
    } else {
      all_fitted = false;
      jf["slope"] = nullptr;
      jf["offset"] = nullptr;
      jf["r_squared"] = nullptr;
    }
    fits.push_back(jf);

    json entry{{"delta_vt_v", num(dvt)}, {"valley", jpts}};
    if (v.tcmap_alphas) {
      if (!(v.tcmap_alphas->start > 1.0)) throw InputError("config: tcmap alphas must be > 1");
      if (!(v.tcmap_k_ptats->start >= 1.0)) throw InputError("config: tcmap K_PTAT values must be >= 1");
      const auto ma = linspace(v.tcmap_alphas->start, v.tcmap_alphas->stop, v.tcmap_alphas->count);
      const auto mk = v.tcmap_k_ptats->count > 1
                          ? log_spaced(v.tcmap_k_ptats->start, v.tcmap_k_ptats->stop, v.tcmap_k_ptats->count)
                          : std::vector<double>{v.tcmap_k_ptats->start};
      const TcMap map = grid_tc_map(cfg.tech, dvt, ma, mk, cfg.grid);
      CsvTable mcsv({"alpha", "k_ptat", "tc_ppm_per_c", "s_iref_pct_per_mv", "feasible"});
      json cells = json::array();
      for (const auto& c : map.cells) {
        mcsv.add({fmt(c.alpha), fmt(c.k_ptat), fmt(c.tc), fmt(per_volt_to_pct_per_mv(c.s_iref)),
                  c.feasible ? "1" : "0"});
        cells.push_back({{"alpha", num(c.alpha)},
                         {"k_ptat", num(c.k_ptat)},
                         {"tc_ppm_per_c", num(c.tc)},
                         {"s_iref_pct_per_mv", num(per_volt_to_pct_per_mv(c.s_iref))},
                         {"feasible", c.feasible}});
      }
      if (cfg.format == "csv") out.add("tcmap_" + dvt_tag(dvt) + ".csv", mcsv.str());
      entry["tcmap"] = cells;
    }
    if (cfg.format == "csv") out.add("valley_" + dvt_tag(dvt) + ".csv", csv.str());
    doc["sweeps"].push_back(entry);
  }

  bool slope_up = all_fitted;
  bool offset_up = all_fitted;
  for (std::size_t k = 1; all_fitted && k < fit_list.size(); ++k) {
    slope_up = slope_up && fit_list[k].slope > fit_list[k - 1].slope;
    offset_up = offset_up && fit_list[k].offset > fit_list[k - 1].offset;
  }
  json summary{{"command", "valley"},
               {"fits", fits},
               {"slope_increasing", slope_up},
               {"offset_increasing", offset_up}};
  if (cfg.format == "csv") {
    out.add_json("valley_fit.json", summary);
  } else {
    doc["fits"] = fits;
    doc["slope_increasing"] = slope_up;
    doc["offset_increasing"] = offset_up;
    out.add_json("valley.json", doc);
  }
  return out;
}

inline SizingOptions sizing_options(const config::SizingSpec& s) {
  SizingOptions o = s.profile == "fdsoi" ? SizingOptions::fdsoi() : SizingOptions::bulk();
  if (s.i_f6) o.i_f6 = *s.i_f6;
  if (s.mirror_if) o.mirror_if = *s.mirror_if;
  return o;
}

inline json sizing_json(const SizingResult& r) {
  json j;
  j["method"] = r.method;
  j["alpha"] = num(r.alpha);
  j["beta"] = num(r.beta);
  j["aspect_ratios"] = {{"s1", num(r.s1)}, {"s2", num(r.s2)}, {"s3", num(r.s3)}, {"s4", num(r.s4)},
                        {"s5", num(r.s5)}, {"s6", num(r.s6)}, {"s7", num(r.s7)}, {"s10", num(r.s10)}};
  if (r.s8) j["aspect_ratios"]["s8"] = num(*r.s8);
  if (r.s9) j["aspect_ratios"]["s9"] = num(*r.s9);
  j["inversion_levels"] = {{"i_f1", num(r.i_f1)}, {"i_r1", num(r.i_r1)}, {"i_f2", num(r.i_f2)},
                           {"i_f6", num(r.i_f6)}, {"i_f7", num(r.i_f7)}, {"mirror", num(r.mirror_if)}};
  j["delta_vt_v"] = num(r.delta_vt);
  j["v_x_v"] = num(r.v_x);
  j["v_g_v"] = num(r.v_g);
  j["s_iref_pct_per_mv"] = num(per_volt_to_pct_per_mv(r.s_iref));
  j["i_ref_a"] = num(r.i_ref);
  j["isq_ratio_21"] = num(r.isq_ratio_21);
  j["kcl_relative_error"] = num(r.kcl_relative_error());
  json b{{"vds_sat", num(r.budget.vds_sat)}, {"vsg1", num(r.budget.vsg1)},   {"vsg2", num(r.budget.vsg2)},
         {"vsg7", num(r.budget.vsg7)},       {"vgs4", num(r.budget.vgs4)},   {"vsd6c_sat", num(r.budget.vsd6c_sat)}};
  b["vsg8"] = r.budget.vsg8 ? num(*r.budget.vsg8) : json(nullptr);
  j["voltage_budget_v"] = b;
  j["v_dd_min_v"] = num(r.v_dd_min);
  return j;
}

inline StagedOutput cmd_size(const config::RunConfig& cfg) {
  const auto opts = sizing_options(cfg.sizing);
  json doc;
  doc["command"] = "size";
  DesignPoint design = cfg.design;
  if (cfg.sizing.methodology) {
    MethodologyOptions mopt;
    mopt.fit_alphas = linspace(cfg.valley.alphas.start, cfg.valley.alphas.stop, cfg.valley.alphas.count);
    mopt.grid = cfg.grid;
    mopt.sizing = opts;
    mopt.valley.k_lo = cfg.valley.k_lo;
    mopt.valley.k_hi = cfg.valley.k_hi;
    const MethodologyResult m = methodology_loop(cfg.tech, cfg.design, mopt);
    design = m.design;
    json bracket = json::array();
    for (const auto& b : m.bracket) bracket.push_back({{"alpha", num(b.alpha)}, {"tc_ppm_per_c", num(b.tc)}});
    doc["methodology"] = {{"fit", {{"slope", num(m.fit.slope)}, {"offset", num(m.fit.offset)},
                                   {"r_squared", num(m.fit.r_squared)}}},
                          {"alpha_guess", num(m.alpha_guess)},
                          {"tc_guess_ppm_per_c", num(m.tc_guess)},
                          {"alpha_sim", num(m.alpha_sim)},
                          {"tc_sim_ppm_per_c", num(m.tc_sim)},
                          {"bracket_widened", m.widened},
                          {"bracket", bracket}};
  }
  const SizingResult acm_result = size_acm(design, cfg.tech, opts);
  SizingResult final_result = acm_result;
  if (cfg.sizing.mode == "lut") {
    const DeviceLUT lut = read_lut_csv(*cfg.sizing.lut_path, cfg.sizing.lut_length_m);
    final_result = size_lut(design, cfg.tech, lut, opts);
    auto rel = [](double a, double b) { return num(std::abs(a - b) / std::abs(b)); };
    doc["acm_comparison"] = {{"s1", rel(final_result.s1, acm_result.s1)},
                             {"s2", rel(final_result.s2, acm_result.s2)},
                             {"alpha", rel(final_result.alpha, acm_result.alpha)},
                             {"beta", rel(final_result.beta, acm_result.beta)}};
  }
  doc["sizing"] = sizing_json(final_result);
  doc["tc_ppm_per_c"] = num(tc_of(cfg.tech, design.delta_vt, design.alpha, design.k_ptat, cfg.grid));

  StagedOutput out(cfg.output_dir);
  out.add_json("size.json", doc);
  if (cfg.format == "csv") {
    const auto& r = final_result;
    CsvTable csv({"device", "aspect_ratio"});
    const std::vector<std::pair<std::string, double>> rows{{"M1", r.s1}, {"M2", r.s2}, {"M3", r.s3},
                                                           {"M4", r.s4}, {"M5", r.s5}, {"M6", r.s6},
                                                           {"M7", r.s7}, {"M10", r.s10}};
    for (const auto& [name, s] : rows) csv.add({name, fmt(s)});
    out.add("sizes.csv", csv.str());
  }
  return out;
}

inline StagedOutput cmd_mc(const config::RunConfig& cfg) {
  if (!cfg.mc) throw InputError("config: the mc verb needs an 'mc' section");
  const auto& spec = *cfg.mc;
  const Temperature t = Temperature::celsius(spec.temperature_c);
  json doc;
  doc["command"] = "mc";
  doc["mode"] = spec.mode;
  doc["sigma_vx_v"] = num(spec.sigma_vx);
  StagedOutput out(cfg.output_dir);

  const double s_model = operating_point(cfg.design, cfg.tech, t, 1.0).s_iref;
  if (spec.mode == "first_order") {
    const double s = spec.s_iref_pct_per_mv ? pct_per_mv_to_per_volt(*spec.s_iref_pct_per_mv) : s_model;
    const auto est = first_order_variability(spec.sigma_vx, s);
    doc["s_iref_pct_per_mv"] = num(per_volt_to_pct_per_mv(s));
    doc["s_iref_pinned"] = spec.s_iref_pct_per_mv.has_value();
    doc["sigma_over_mu_pct"] = num(est.sigma_over_mu * 100.0);
    out.add_json("mc.json", doc);
    return out;
  }

  if (spec.trials < 100) throw InputError("config: mc.trials must be >= 100");
  if (!spec.seed) throw InputError("config: Monte Carlo needs a seed (mc.seed or --seed)");
  const double s2n = s2_over_n_for_target(cfg.design, cfg.tech);
  const McResult r =
      monte_carlo_variability(cfg.design, cfg.tech, t, spec.sigma_vx, spec.trials, *spec.seed, s2n, spec.histogram_bins);
  const auto fo = first_order_variability(spec.sigma_vx, s_model);
  doc["seed"] = *spec.seed;
  doc["trials"] = r.trials;
  doc["failures"] = r.failures;
  doc["temperature_c"] = num(spec.temperature_c);
  doc["mean_i_ref_a"] = num(r.mean);
  doc["std_i_ref_a"] = num(r.stddev);
  doc["sigma_over_mu_pct"] = num(r.sigma_over_mu * 100.0);
  doc["first_order_sigma_over_mu_pct"] = num(fo.sigma_over_mu * 100.0);
  doc["s_iref_pct_per_mv"] = num(per_volt_to_pct_per_mv(s_model));

  CsvTable hist({"bin_lo_a", "bin_hi_a", "count"});
  json jh = json::array();
  const double w = r.histogram.bin_width();
  for (std::size_t k = 0; k < r.histogram.counts.size(); ++k) {
    const double lo = r.histogram.lo + w * static_cast<double>(k);
    const double hi = k + 1 == r.histogram.counts.size() ? r.histogram.hi : lo + w;
    hist.add({fmt(lo), fmt(hi), std::to_string(r.histogram.counts[k])});
    jh.push_back({{"bin_lo_a", num(lo)}, {"bin_hi_a", num(hi)}, {"count", r.histogram.counts[k]}});
  }
  if (cfg.format == "csv") {
    CsvTable csv({"trial", "delta_vt_v", "i_ref_a"});
    for (const auto& s : r.samples) csv.add({std::to_string(s.trial), fmt(s.delta_vt), fmt(s.i_ref)});
    out.add("mc.csv", csv.str());
    out.add("mc_hist.csv", hist.str());
  } else {
    doc["histogram"] = jh;
  }
  out.add_json("mc.json", doc);
  return out;
}

inline StagedOutput cmd_smallsignal(const config::RunConfig& cfg) {
  if (!cfg.small_signal) throw InputError("config: the smallsignal verb needs a 'small_signal' section");
  const auto& spec = *cfg.small_signal;
  const auto& ss = spec.set;
  const double s = spec.s_iref_pct_per_mv
                       ? pct_per_mv_to_per_volt(*spec.s_iref_pct_per_mv)
                       : operating_point(cfg.design, cfg.tech, reference_temperature(), 1.0).s_iref;
  const double i_ref = spec.i_ref.value_or(cfg.design.i_ref_target);
  const double r = r_scm(i_ref, s);
  const double basic = ls_vx_basic(ss);
  const double casc = ls_vx_cascoded(ss);
  const double full = ls_vx_cascoded_full(ss, r);

  json doc;
  doc["command"] = "smallsignal";
  doc["s_iref_pct_per_mv"] = num(per_volt_to_pct_per_mv(s));
  doc["i_ref_a"] = num(i_ref);
  doc["r_scm_ohm"] = num(r);
  doc["ls_vx_basic_v_per_v"] = num(basic);
  doc["ls_vx_cascoded_v_per_v"] = num(casc);
  doc["ls_vx_cascoded_full_v_per_v"] = num(full);
  doc["cascode_improvement"] = num(basic / casc);
  doc["ls_iref_basic_pct_per_v"] = num(ls_iref(basic, s));
  doc["ls_iref_cascoded_pct_per_v"] = num(ls_iref(casc, s));
  doc["dominant_pole_hz"] = num(dominant_pole(ss));
  doc["reference_ls_vx_v_per_v"] = spec.reference_ls_vx ? num(*spec.reference_ls_vx) : json(nullptr);
  doc["reference_ls_iref_pct_per_v"] = spec.reference_ls_iref ? num(*spec.reference_ls_iref) : json(nullptr);

  StagedOutput out(cfg.output_dir);
  out.add_json("smallsignal.json", doc);
  return out;
}

struct LutGenSpec {
  double vg_lo = 0.0;
  double vg_hi = 0.8;
  std::size_t vg_points = 401;
  double vs_hi = 0.3;
  std::size_t vs_points = 61;
  double length_m = 1e-6;
};

/// ACM-synthesized LUT CSV for the configured technology at 25 degC.
inline StagedOutput cmd_lutgen(const config::RunConfig& cfg, const LutGenSpec& g) {
  if (g.vg_points < 2 || g.vs_points < 2 || !(g.vg_hi > g.vg_lo) || !(g.vs_hi > 0.0)) {
    throw InputError("lutgen: bad grid specification");
  }
  const auto vg = linspace(g.vg_lo, g.vg_hi, g.vg_points);
  const auto vs = linspace(0.0, g.vs_hi, g.vs_points);
  const DeviceLUT lut = synthesize_acm_lut(cfg.tech, vg, vs, g.length_m);
  std::string text = "vg_v,vs_v,id_per_w_a_per_m,gm_over_id_per_v\n";
  char buf[128];
  for (std::size_t i = 0; i < vg.size(); ++i) {
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const std::size_t k = i * vs.size() + j;
      // 17 digits so the grid and currents survive a round trip exactly.
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", vg[i], vs[j], lut.id_per_w_table()[k],
                    lut.gm_over_id_table()[k]);
      text += buf;
    }
  }
  StagedOutput out(cfg.output_dir);
  out.add("lut.csv", text);
  return out;
}

}  // namespace scmref::commands
