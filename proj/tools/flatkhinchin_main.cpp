#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "flatkhinchin/circle_measure.hpp"
#include "flatkhinchin/cylinders.hpp"
#include "flatkhinchin/experiments.hpp"
#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/iet.hpp"
#include "flatkhinchin/io.hpp"
#include "flatkhinchin/series.hpp"
#include "flatkhinchin/surface.hpp"

using nlohmann::json;
using namespace flatkhinchin;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "json";
  std::string out;
};

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw BadParameterError("cannot open output file: " + g.out);
  f << text;
}

void emit_json(const GlobalOpts& g, const json& j) { emit(g, j.dump(1)); }

struct TransversalSpec {
  int poly = 0;
  double bx = 0, by = 0;
  double tau = 0;
  double length = 1;
};

TransversalSpec parse_transversal(const std::string& text) {
  TransversalSpec ts;
  std::stringstream ss(text);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() != 5)
    throw BadParameterError("transversal spec is poly,base_x,base_y,tau,length");
  ts.poly = static_cast<int>(vals[0]);
  ts.bx = vals[1];
  ts.by = vals[2];
  ts.tau = vals[3];
  ts.length = vals[4];
  return ts;
}

std::string csv_escape_free(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"straight-line flows, cylinders, and recurrence experiments on "
               "translation surfaces"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed for all sampling");
  app.add_option("--threads", g.threads, "worker threads (results are identical)");
  app.add_option("--format", g.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out, "write the report to a file instead of stdout");

  // surface info
  auto* surface_cmd = app.add_subcommand("surface", "surface inspection");
  auto* info = surface_cmd->add_subcommand("info", "genus, sigma, area, singularities")->fallthrough();
  std::string info_spec;
  info->add_option("spec", info_spec, "builtin:NAME or a spec file")->required();

  // flow trace
  auto* flow_cmd = app.add_subcommand("flow", "straight-line flow");
  auto* tracec = flow_cmd->add_subcommand("trace", "event log of one trajectory")->fallthrough();
  std::string tr_surface;
  int tr_poly = 0;
  double tr_x = 0, tr_y = 0, tr_tau = 0, tr_t = 1;
  tracec->add_option("--surface", tr_surface)->required();
  tracec->add_option("--poly", tr_poly);
  tracec->add_option("--x", tr_x)->required();
  tracec->add_option("--y", tr_y)->required();
  tracec->add_option("--tau", tr_tau)->required();
  tracec->add_option("--t", tr_t)->required();

  // cylinders enumerate
  auto* cyl_cmd = app.add_subcommand("cylinders", "periodic cylinders");
  auto* enumc = cyl_cmd->add_subcommand("enumerate", "maximal cylinders up to a length")->fallthrough();
  std::string cy_surface;
  double cy_length = 10;
  double cy_min_area = -1;
  enumc->add_option("--surface", cy_surface)->required();
  enumc->add_option("--length", cy_length)->required();
  enumc->add_option("--min-area", cy_min_area, "area-fraction cut (default: sigma)");

  // iet build / scan
  auto* iet_cmd = app.add_subcommand("iet", "first-return interval exchanges");
  auto* buildc = iet_cmd->add_subcommand("build", "first-return exchange data")->fallthrough();
  std::string ib_surface, ib_transversal = "0,0,0,0,1";
  double ib_tau = 0;
  buildc->add_option("--surface", ib_surface)->required();
  buildc->add_option("--tau", ib_tau)->required();
  buildc->add_option("--transversal", ib_transversal, "poly,base_x,base_y,tau,length");
  auto* scanc = iet_cmd->add_subcommand("scan", "shrinking-target orbit scans")->fallthrough();
  std::string is_surface, is_transversal = "0,0,0,0,1", is_seq = "harmonic:1";
  double is_tau = -1, is_x = -1;
  long is_N = 100000;
  int is_samples = 1;
  scanc->add_option("--surface", is_surface)->required();
  scanc->add_option("--seq", is_seq, "target sequence a_n");
  scanc->add_option("--N", is_N, "orbit length");
  scanc->add_option("--samples", is_samples, "sampled directions (ignored with --tau)");
  scanc->add_option("--tau", is_tau, "scan one fixed direction");
  scanc->add_option("--x", is_x, "start point for --tau (default: 0.3*length)");
  scanc->add_option("--transversal", is_transversal);

  // series check
  auto* series_cmd = app.add_subcommand("series", "divergence partial sums");
  auto* checkc = series_cmd->add_subcommand("check", "partial sums and verdicts")->fallthrough();
  std::string se_gen = "harmonic:1";
  long se_K = 1000000;
  checkc->add_option("--gen", se_gen)->required();
  checkc->add_option("--K", se_K);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "invariant verifiers");
  auto* vflow = verify_cmd->add_subcommand("lemma-flow", "cylinder separation bound")->fallthrough();
  std::string vf_surface;
  double vf_length = 20;
  vflow->add_option("--surface", vf_surface)->required();
  vflow->add_option("--length", vf_length);
  auto* vcover = verify_cmd->add_subcommand("covering", "direction-circle covering")->fallthrough();
  std::string vc_surface;
  double vc_length = 10, vc_constant = -1;
  vcover->add_option("--surface", vc_surface)->required();
  vcover->add_option("--length", vc_length);
  vcover->add_option("--constant", vc_constant, "check this constant instead of searching");
  auto* vsum = verify_cmd->add_subcommand("sum-bound", "arc-union measure bound")->fallthrough();
  std::string vs_surface;
  double vs_length = 10;
  int vs_k = 6;
  vsum->add_option("--surface", vs_surface)->required();
  vsum->add_option("--length", vs_length);
  vsum->add_option("--dyadic-k", vs_k);
  auto* vkey = verify_cmd->add_subcommand("key", "annulus mass near an interval")->fallthrough();
  std::string vk_surface;
  double vk_N = 50, vk_C1 = 2, vk_j0 = 0, vk_j1 = 1;
  vkey->add_option("--surface", vk_surface)->required();
  vkey->add_option("--N", vk_N)->required();
  vkey->add_option("--C1", vk_C1)->required();
  vkey->add_option("--j0", vk_j0);
  vkey->add_option("--j1", vk_j1);
  auto* vtrans = verify_cmd->add_subcommand("translation", "perturbed-direction returns")->fallthrough();
  std::string vt_surface;
  double vt_eps = 1e-3;
  int vt_count = 5, vt_samples = 10000;
  vtrans->add_option("--surface", vt_surface)->required();
  vtrans->add_option("--eps", vt_eps);
  vtrans->add_option("--count", vt_count, "number of shortest cylinders to test");
  vtrans->add_option("--samples", vt_samples);

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "seeded experiments");
  auto* eflow = exp_cmd->add_subcommand("khinchin-flow", "flow recurrence experiment")->fallthrough();
  std::string ef_surface, ef_f = "harmonic:1";
  int ef_samples = 100;
  double ef_horizon = 1e4, ef_cyl_length = 1280;
  eflow->add_option("--surface", ef_surface)->required();
  eflow->add_option("--f", ef_f, "target function f(t)");
  eflow->add_option("--samples", ef_samples);
  eflow->add_option("--horizon", ef_horizon);
  eflow->add_option("--cyl-length", ef_cyl_length);
  auto* eiet = exp_cmd->add_subcommand("iet-recurrence", "sampled-direction IET scans")->fallthrough();
  std::string ei_surface, ei_seq = "harmonic:1", ei_transversal = "0,0,0,0,1";
  int ei_samples = 100;
  long ei_N = 100000;
  eiet->add_option("--surface", ei_surface)->required();
  eiet->add_option("--seq", ei_seq);
  eiet->add_option("--samples", ei_samples);
  eiet->add_option("--N", ei_N);
  eiet->add_option("--transversal", ei_transversal);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*info) {
      emit_json(g, surface_info_json(load_surface(info_spec)));
    } else if (*tracec) {
      auto s = load_surface(tr_surface);
      auto events = trace(s, {tr_poly, {tr_x, tr_y}}, Direction(tr_tau), tr_t);
      std::ostringstream os;
      for (const auto& ev : events) {
        const char* kind = ev.kind == TrajectoryEvent::Kind::edge_crossing
                               ? "edge_crossing"
                               : ev.kind == TrajectoryEvent::Kind::singularity_hit
                                     ? "singularity_hit"
                                     : "time_reached";
        os << json{{"kind", kind},
                   {"time", ev.time},
                   {"point", json::array({ev.point.poly, ev.point.pos.x,
                                          ev.point.pos.y})}}
                  .dump()
           << "\n";
      }
      emit(g, os.str());
    } else if (*enumc) {
      auto s = load_surface(cy_surface);
      double min_area = cy_min_area > 0 ? cy_min_area : s.sigma();
      auto cyls = enumerate_cylinders(s, cy_length, min_area);
      if (g.format == "csv") {
        std::ostringstream os;
        os << "tau,T,h,area\n";
        for (const auto& c : cyls)
          os << csv_escape_free(c.direction.tau) << ","
             << csv_escape_free(c.core_length) << "," << csv_escape_free(c.height)
             << "," << csv_escape_free(c.area_fraction) << "\n";
        emit(g, os.str());
      } else {
        json arr = json::array();
        for (const auto& c : cyls)
          arr.push_back(json{{"tau", c.direction.tau},
                             {"T", c.core_length},
                             {"h", c.height},
                             {"area", c.area_fraction},
                             {"witness", json::array({c.witness.poly, c.witness.pos.x,
                                                      c.witness.pos.y})}});
        emit_json(g, json{{"surface", cy_surface},
                          {"length", cy_length},
                          {"min_area", min_area},
                          {"cylinders", arr}});
      }
    } else if (*buildc) {
      auto s = load_surface(ib_surface);
      auto ts = parse_transversal(ib_transversal);
      Transversal t(s, {ts.poly, {ts.bx, ts.by}}, Direction(ts.tau), ts.length);
      Iet iet = first_return_iet(s, Direction(ib_tau), t);
      emit_json(g, json{{"surface", ib_surface},
                        {"tau", ib_tau},
                        {"domain_length", iet.domain_length},
                        {"closed", iet.closed},
                        {"breakpoints", iet.breakpoints},
                        {"translations", iet.translations}});
    } else if (*scanc) {
      auto s = load_surface(is_surface);
      auto ts = parse_transversal(is_transversal);
      SequenceSpec seq = SequenceSpec::parse(is_seq);
      if (is_tau >= 0) {
        Transversal t(s, {ts.poly, {ts.bx, ts.by}}, Direction(ts.tau), ts.length);
        Iet iet = first_return_iet(s, Direction(is_tau), t);
        double x0 = is_x >= 0 ? is_x : 0.3 * iet.domain_length;
        auto scan = recurrence_scan(iet, x0, seq, is_N);
        if (g.format == "csv") {
          std::ostringstream os;
          os << "n,distance,a_n\n";
          for (std::size_t k = 0; k < scan.hits.size(); ++k)
            os << scan.hits[k] << "," << csv_escape_free(scan.hit_distances[k])
               << "," << csv_escape_free(seq(double(scan.hits[k]))) << "\n";
          emit(g, os.str());
        } else {
          emit_json(g, json{{"tau", is_tau},
                            {"x", x0},
                            {"N", is_N},
                            {"hits", scan.hits},
                            {"hit_distances", scan.hit_distances},
                            {"min_ratio", scan.min_ratio},
                            {"tail_min_ratio", scan.tail_min_ratio},
                            {"first_hit", scan.first_hit}});
        }
      } else {
        IetRecurrenceConfig cfg;
        cfg.surface_name = is_surface;
        cfg.a = seq;
        cfg.samples = is_samples;
        cfg.N = is_N;
        cfg.seed = g.seed;
        cfg.threads = g.threads;
        cfg.base = {ts.poly, {ts.bx, ts.by}};
        cfg.base_tau = ts.tau;
        cfg.length = ts.length;
        emit_json(g, run_iet_khinchin(s, cfg));
      }
    } else if (*checkc) {
      SequenceSpec spec = SequenceSpec::parse(se_gen);
      auto sums = partial_sums(spec, se_K);
      auto rep = divergence_verdict(spec);
      emit_json(g, json{{"gen", se_gen},
                        {"K", se_K},
                        {"sum_i_ai", sums.sum_i_ai},
                        {"sum_a_floor_sqrt", sums.sum_a_floor_sqrt},
                        {"sandwich_lower", sums.sandwich_lower},
                        {"sandwich_upper", sums.sandwich_upper},
                        {"verdicts",
                         {{"sum_ai", verdict_name(rep.sum_ai)},
                          {"sum_i_ai", verdict_name(rep.sum_i_ai)},
                          {"sum_a_floor_sqrt", verdict_name(rep.sum_a_floor_sqrt)}}}});
    } else if (*vflow) {
      auto s = load_surface(vf_surface);
      emit_json(g, separation_report_json(verify_cylinder_separation(s, vf_length)));
    } else if (*vcover) {
      auto s = load_surface(vc_surface);
      emit_json(g, verify_covering_report(s, vc_length, vc_constant));
    } else if (*vsum) {
      auto s = load_surface(vs_surface);
      emit_json(g, verify_sum_bound_report(s, vs_length, vs_k));
    } else if (*vkey) {
      auto s = load_surface(vk_surface);
      emit_json(g, verify_key_report(s, vk_N, vk_C1, vk_j0, vk_j1));
    } else if (*vtrans) {
      auto s = load_surface(vt_surface);
      auto cyls = cylinder_sequence(s, 6.0);
      json arr = json::array();
      int n = std::min<int>(vt_count, static_cast<int>(cyls.size()));
      for (int i = 0; i < n; ++i) {
        auto chk = run_translation_check(s, cyls[i], vt_eps, vt_samples, g.seed);
        arr.push_back(json{{"tau", cyls[i].direction.tau},
                           {"T", cyls[i].core_length},
                           {"area", cyls[i].area_fraction},
                           {"fraction_close", chk.fraction_close},
                           {"threshold", chk.threshold},
                           {"required", 0.25 * cyls[i].area_fraction},
                           {"mean_displacement", chk.mean_displacement},
                           {"max_displacement", chk.max_displacement},
                           {"pass", chk.fraction_close >= 0.25 * cyls[i].area_fraction}});
      }
      emit_json(g, json{{"surface", vt_surface}, {"eps", vt_eps}, {"cylinders", arr}});
    } else if (*eflow) {
      auto s = load_surface(ef_surface);
      KhinchinFlowConfig cfg;
      cfg.surface_name = ef_surface;
      cfg.f = SequenceSpec::parse(ef_f);
      cfg.samples = ef_samples;
      cfg.horizon = ef_horizon;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      cfg.cyl_length = ef_cyl_length;
      json rep = run_khinchin_flow(s, cfg);
      if (g.format == "csv") {
        std::ostringstream os;
        os << "sample,t,distance,bound\n";
        for (const auto& smp : rep["samples"])
          for (const auto& h : smp["hits"])
            os << smp["i"] << "," << csv_escape_free(h[0].get<double>()) << ","
               << csv_escape_free(h[1].get<double>()) << ","
               << csv_escape_free(h[2].get<double>()) << "\n";
        emit(g, os.str());
      } else {
        emit_json(g, rep);
      }
    } else if (*eiet) {
      auto s = load_surface(ei_surface);
      auto ts = parse_transversal(ei_transversal);
      IetRecurrenceConfig cfg;
      cfg.surface_name = ei_surface;
      cfg.a = SequenceSpec::parse(ei_seq);
      cfg.samples = ei_samples;
      cfg.N = ei_N;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      cfg.base = {ts.poly, {ts.bx, ts.by}};
      cfg.base_tau = ts.tau;
      cfg.length = ts.length;
      emit_json(g, run_iet_khinchin(s, cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
