#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qsynth/fixtures.hpp"
#include "qsynth/io.hpp"
#include "qsynth/momentsim.hpp"
#include "qsynth/realization.hpp"
#include "qsynth/robustness.hpp"

namespace {

using qsynth::io::json;
using namespace qsynth;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitParseError = 2;

double env_tol(double fallback) {
  const char* env = std::getenv("QSYNTH_TOL");
  if (env == nullptr) return fallback;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || v <= 0) {
    std::cerr << "warning: ignoring malformed QSYNTH_TOL\n";
    return fallback;
  }
  return v;
}

void emit_report(const json& report, const std::string& path) {
  if (path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    io::save_json_file(path, report);
  }
}

json eigs_to_json(const std::vector<Complex>& eigs) {
  json out = json::array();
  for (const Complex& e : eigs) out.push_back({e.real(), e.imag()});
  return out;
}

json realizability_to_json(const RealizabilityReport& rep) {
  json j;
  j["realizable"] = rep.realizable;
  j["residual_A"] = rep.residual_A;
  j["residual_B"] = rep.residual_B;
  j["d_conforms"] = rep.d_conforms;
  j["tol"] = rep.tol;
  return j;
}

struct CheckOptions {
  std::string file;
  bool extract = false;
  bool augment = false;
  std::string report_path;
};

int run_check(const CheckOptions& opt) {
  const json doc = io::load_json_file(opt.file);
  LinearQsde sys;
  if (io::looks_like_plant(doc)) {
    // A plant checks as the QSDE dx = A x dt + [B0 B1 B2] dnoise, dy = C2 x dt + ...
    const Plant p = io::plant_from_json(doc);
    sys.A = p.A;
    sys.B.resize(p.n(), p.n_v() + p.n_w() + p.n_u());
    sys.B << p.B0, p.B1, p.B2;
    sys.C = p.C2;
    sys.D.resize(p.n_y(), sys.B.cols());
    sys.D << p.D20, p.D21, Mat::Zero(p.n_y(), p.n_u());
    sys.theta = p.thetaP;
    sys.ito = ito_concat(p.Fv, ito_concat(p.Fw, canonical_ito(p.n_u())));
    sys.output_channel_offset = p.n_v();  // y is fed by the w block
  } else {
    sys = io::qsde_from_json(doc);
  }

  if (sys.n_y() % 2 != 0 || sys.n_w() < sys.n_y()) sys = pad_to_convention(sys);

  // QSYNTH_TOL rescales the base residual tolerance for both checks
  const double base_tol = env_tol(kResidualTol);
  const CommutationCheck comm = preserves_commutation(sys, base_tol);
  RealizabilityReport rep = check_physical_realizability(sys);
  const double tol = rep.tol / kResidualTol * base_tol;
  rep.tol = tol;
  rep.realizable = rep.residual_A <= tol && rep.residual_B <= tol && rep.d_conforms;

  json report;
  report["version"] = "qsynth-report/1";
  report["command"] = "check";
  report["input"] = opt.file;
  json comm_j;
  comm_j["holds"] = comm.holds;
  comm_j["residual"] = comm.residual;
  report["commutation"] = comm_j;
  report["realizability"] = realizability_to_json(rep);
  if (opt.extract && rep.params) {
    report["hamiltonian_R"] = io::matrix_to_json_sig(rep.params->R);
    report["coupling_re"] = io::matrix_to_json_sig(rep.params->Lambda.real());
    report["coupling_im"] = io::matrix_to_json_sig(rep.params->Lambda.imag());
  }
  if (opt.augment && rep.augmentation) {
    json aug;
    aug["system"] = io::qsde_to_json(rep.augmentation->sys);
    aug["permutation"] = io::matrix_to_json(rep.augmentation->P);
    report["augmentation"] = std::move(aug);
  }
  emit_report(report, opt.report_path);

  std::cerr << "commutation: " << (comm.holds ? "holds" : "violated")
            << " (residual " << comm.residual << ")\n";
  std::cerr << "realizable: " << (rep.realizable ? "yes" : "no") << "\n";
  return comm.holds && rep.realizable ? kExitOk : kExitCheckFailed;
}

struct SynthesizeOptions {
  std::string file;
  double g = 0.0;
  std::string realize;  // "", "quantum", "classical", "mixed:<nprime>"
  std::string out_controller;
  std::string report_path;
  bool sweep = false;
  int grid = 11;
};

json synthesis_to_json(const SynthesisResult& res) {
  json j;
  j["status"] = to_string(res.status);
  j["g"] = res.g;
  if (!res.diagnostic.empty()) j["diagnostic"] = res.diagnostic;
  json a1;
  a1["e1_positive"] = res.a1.e1_positive;
  a1["e2_positive"] = res.a1.e2_positive;
  a1["pencil_12_full_rank"] = res.a1.pencil_12_full_rank;
  a1["pencil_21_full_rank"] = res.a1.pencil_21_full_rank;
  j["assumption_a1"] = a1;
  if (res.X) {
    j["X"] = io::matrix_to_json_sig(res.X->X);
    j["riccati_X_residual"] = res.X->residual;
    j["riccati_X_closed_loop_eigs"] = eigs_to_json(res.X->closed_loop_eigs);
  }
  if (res.Y) {
    j["Y"] = io::matrix_to_json_sig(res.Y->X);
    j["riccati_Y_residual"] = res.Y->residual;
    j["riccati_Y_closed_loop_eigs"] = eigs_to_json(res.Y->closed_loop_eigs);
  }
  if (res.X && res.Y) {
    json a2;
    a2["x_stabilizing"] = res.a2.x_stabilizing;
    a2["y_stabilizing"] = res.a2.y_stabilizing;
    a2["rho_xy"] = res.a2.rho_xy;
    j["assumption_a2"] = a2;
  }
  if (res.triple) {
    json c;
    c["A_K"] = io::matrix_to_json_sig(res.triple->A_K);
    c["B_K"] = io::matrix_to_json_sig(res.triple->B_K);
    c["C_K"] = io::matrix_to_json_sig(res.triple->C_K);
    j["controller"] = c;
  }
  if (res.certificate) {
    json c;
    c["strict"] = res.certificate->strict;
    c["epsilon"] = res.certificate->epsilon;
    c["lambda0"] = res.certificate->lambda0;
    c["X"] = io::matrix_to_json_sig(res.certificate->X);
    j["certificate"] = c;
  }
  return j;
}

int run_synthesize(const SynthesizeOptions& opt) {
  const json doc = io::load_json_file(opt.file);
  if (!io::looks_like_plant(doc)) throw io::ParseError("synthesize expects a plant file");
  Plant plant = io::plant_from_json(doc);
  double g = opt.g;

  json report;
  report["version"] = "qsynth-report/1";
  report["command"] = "synthesize";
  report["input"] = opt.file;

  if (doc.contains("uncertainty")) {
    const json& u = doc.at("uncertainty");
    const double mu = u.at("mu").get<double>();
    const Mat S = io::matrix_from_json(u.at("S"), plant.n(), plant.n(), "uncertainty.S");
    plant = overbound_uncertainty(plant, mu, S, g).augmented;
    json uj;
    uj["mu"] = mu;
    uj["applied"] = true;
    report["uncertainty"] = uj;
  }

  if (opt.sweep) {
    const double gmin = feasibility_sweep(plant, g > 0 ? g : 1.0);
    report["g_feasibility_frontier"] = gmin;
    std::cerr << "smallest feasible g ~= " << gmin << "\n";
  }

  const SynthesisResult res = synthesize(plant, g);
  report["synthesis"] = synthesis_to_json(res);

  std::optional<FullController> realized;
  if (!opt.realize.empty() && res.ok()) {
    const ControllerTriple& triple = *res.triple;
    // Ito matrix of the measured signal, F_y = D20 Fv D20^T + D21 Fw D21^T,
    // padded with disconnected dummy quadratures when n_y is odd.
    ItoMatrix F_y = ito_decompose(
        (plant.D20.cast<Complex>() * plant.Fv.F() * plant.D20.transpose().cast<Complex>() +
         plant.D21.cast<Complex>() * plant.Fw.F() * plant.D21.transpose().cast<Complex>())
            .eval());
    ControllerTriple padded = triple;
    if (padded.B_K.cols() % 2 != 0) {
      padded.B_K.conservativeResize(Eigen::NoChange, padded.B_K.cols() + 1);
      padded.B_K.col(padded.B_K.cols() - 1).setZero();
      F_y = ito_concat(F_y, classical_ito(1));
    }

    if (opt.realize == "quantum") {
      realized = realize_quantum_controller(padded);
    } else if (opt.realize == "classical") {
      realized = realize_classical_controller(padded, F_y);
    } else if (opt.realize.rfind("mixed:", 0) == 0) {
      const int nprime = std::atoi(opt.realize.c_str() + 6);
      realized = realize_mixed_controller(
          padded, CommutationMatrix::degenerate(static_cast<int>(triple.A_K.rows()), nprime));
    } else {
      throw io::ParseError("--realize must be quantum, classical or mixed:<nprime>");
    }

    json rj;
    rj["mode"] = opt.realize;
    rj["n_vK"] = realized->n_vK() / 2;
    rj["B_K0"] = io::matrix_to_json_sig(realized->B_K0);
    rj["B_K1"] = io::matrix_to_json_sig(realized->B_K1);
    if (realized->oscillator) {
      rj["R"] = io::matrix_to_json_sig(realized->oscillator->R);
      rj["Lambda_re"] = io::matrix_to_json_sig(realized->oscillator->Lambda.real());
      rj["Lambda_im"] = io::matrix_to_json_sig(realized->oscillator->Lambda.imag());
    }
    rj["conditions"] = realizability_to_json(check_physical_realizability(realized->as_qsde(F_y)));
    rj["compatible"] = check_compatibility(*realized);
    report["realization"] = rj;

    if (!opt.out_controller.empty()) {
      io::save_json_file(opt.out_controller, io::controller_to_json(*realized));
    }
  }
  emit_report(report, opt.report_path);
  std::cerr << "synthesis: " << to_string(res.status) << "\n";
  return res.ok() ? kExitOk : kExitCheckFailed;
}

struct AnalyzeOptions {
  std::string system_file;
  std::string plant_file;
  std::string controller_file;
  std::string signal_file;
  std::string out_csv;
  std::string report_path;
  double g = 0.1;
  double horizon = 10.0;
  double dt = 0.0;
  int grid = 11;
};

struct LoadedLoop {
  Mat A, B, C, D;
  std::optional<ClosedLoop> cl;
};

LoadedLoop load_loop(const AnalyzeOptions& opt) {
  LoadedLoop out;
  if (!opt.system_file.empty()) {
    const json doc = io::load_json_file(opt.system_file);
    const LinearQsde sys = io::qsde_from_json(doc);
    out.A = sys.A;
    out.B = sys.B;
    out.C = sys.C;
    out.D = sys.D;
    return out;
  }
  if (opt.plant_file.empty() || opt.controller_file.empty()) {
    throw io::ParseError("need --system or both --plant and --controller");
  }
  const json pdoc = io::load_json_file(opt.plant_file);
  Plant plant = io::plant_from_json(pdoc);
  if (pdoc.contains("uncertainty")) {
    const json& u = pdoc.at("uncertainty");
    plant = overbound_uncertainty(plant,
                                  u.at("mu").get<double>(),
                                  io::matrix_from_json(u.at("S"), plant.n(), plant.n(), "S"),
                                  opt.g)
                .augmented;
  }
  const FullController ctrl = io::controller_from_json(io::load_json_file(opt.controller_file));
  const ClosedLoop cl = close_loop(plant, ctrl);
  out.A = cl.Atil;
  out.B = cl.Btil;
  out.C = cl.Ctil;
  out.D = Mat::Zero(cl.Ctil.rows(), cl.Btil.cols());
  out.cl = cl;
  return out;
}

int run_analyze_norm(const AnalyzeOptions& opt) {
  const LoadedLoop loop = load_loop(opt);
  const double norm = hinf_norm(loop.A, loop.B, loop.C, loop.D, 1e-9);
  json report;
  report["version"] = "qsynth-report/1";
  report["command"] = "analyze-norm";
  report["norm"] = norm;
  emit_report(report, opt.report_path);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", norm);
  std::cerr << "hinf norm = " << buf << "\n";
  return kExitOk;
}

int run_analyze_sbr(const AnalyzeOptions& opt) {
  const LoadedLoop loop = load_loop(opt);
  const SbrResult sbr = strict_bounded_real_check(loop.A, loop.B, loop.C, loop.D, opt.g);
  json report;
  report["version"] = "qsynth-report/1";
  report["command"] = "analyze-sbr";
  report["g"] = opt.g;
  report["holds"] = sbr.holds;
  switch (sbr.reason) {
    case SbrFailure::kNone: break;
    case SbrFailure::kUnstableA: report["reason"] = "unstable-A"; break;
    case SbrFailure::kFeedthroughTooLarge: report["reason"] = "feedthrough-too-large"; break;
    case SbrFailure::kNoStabilizingSolution: report["reason"] = "no-stabilizing-solution"; break;
  }
  if (sbr.X) report["X"] = io::matrix_to_json_sig(*sbr.X);
  emit_report(report, opt.report_path);
  std::cerr << "strict bounded real at g=" << opt.g << ": " << (sbr.holds ? "yes" : "no") << "\n";
  return sbr.holds ? kExitOk : kExitCheckFailed;
}

int run_analyze_robust(const AnalyzeOptions& opt) {
  if (opt.plant_file.empty()) throw io::ParseError("robust analysis needs --plant");
  const json pdoc = io::load_json_file(opt.plant_file);
  if (!pdoc.contains("uncertainty")) {
    throw io::ParseError("robust analysis needs an uncertainty section in the plant file");
  }
  Plant nominal = io::plant_from_json(pdoc);
  const json& u = pdoc.at("uncertainty");
  const UncertainPlant up = overbound_uncertainty(
      nominal, u.at("mu").get<double>(),
      io::matrix_from_json(u.at("S"), nominal.n(), nominal.n(), "S"), opt.g);

  const SynthesisResult res = synthesize(up.augmented, opt.g);
  json report;
  report["version"] = "qsynth-report/1";
  report["command"] = "analyze-robust";
  report["g"] = opt.g;
  report["synthesis"] = synthesis_to_json(res);
  if (!res.ok()) {
    emit_report(report, opt.report_path);
    return kExitCheckFailed;
  }
  FullController ctrl = FullController::shell(*res.triple, up.augmented.n_y());
  if (!opt.controller_file.empty()) {
    ctrl = io::controller_from_json(io::load_json_file(opt.controller_file));
  }
  const ClosedLoop cl = close_loop(up.augmented, ctrl);
  const RobustnessReport rob = robust_stability_check(cl, opt.g, opt.grid);
  json rj;
  rj["certified"] = rob.certified;
  rj["channel_norm"] = rob.channel_norm;
  rj["worst_margin"] = rob.worst_margin;
  rj["samples"] = rob.samples;
  json grid = json::array();
  for (const auto& [delta, margin] : rob.structured_margins) {
    json g;
    g["delta"] = delta;
    g["rightmost_eig"] = margin;
    grid.push_back(g);
  }
  rj["delta_grid"] = grid;
  report["robustness"] = rj;
  emit_report(report, opt.report_path);
  std::cerr << "robust stability: " << (rob.certified ? "certified" : "not certified") << "\n";
  return rob.certified ? kExitOk : kExitCheckFailed;
}

int run_analyze_simulate(const AnalyzeOptions& opt) {
  if (opt.plant_file.empty() || opt.controller_file.empty()) {
    throw io::ParseError("simulate needs --plant and --controller");
  }
  const Plant plant = io::plant_from_json(io::load_json_file(opt.plant_file));
  const FullController ctrl = io::controller_from_json(io::load_json_file(opt.controller_file));
  const ClosedLoop cl = close_loop(plant, ctrl);

  InputSignal sig = InputSignal::zero(static_cast<int>(cl.Btil.cols()), opt.horizon);
  if (!opt.signal_file.empty()) {
    sig = io::signal_from_json(io::load_json_file(opt.signal_file), static_cast<int>(cl.Btil.cols()));
  }
  GaussianState s0;
  s0.mean = Vec::Zero(cl.Atil.rows());
  s0.cov = Mat::Zero(cl.Atil.rows(), cl.Atil.rows());
  OutputSpec outs;
  outs.Cz = cl.Ctil;
  outs.Dz = Mat::Zero(cl.Ctil.rows(), cl.Btil.cols());
  const Trajectory traj =
      propagate_moments(cl.Atil, cl.Btil, cl.Gtil, cl.F_combined, s0, sig, opt.dt, outs);
  if (opt.out_csv.empty()) {
    io::write_trajectory_csv(std::cout, traj);
  } else {
    std::ofstream out(opt.out_csv);
    if (!out) throw Error("cannot write " + opt.out_csv);
    io::write_trajectory_csv(out, traj);
    std::cerr << "trajectory written to " << opt.out_csv << "\n";
  }
  return kExitOk;
}

int run_fixtures(const std::string& dir) {
  const auto dump = [&](const std::string& name, const json& j) {
    io::save_json_file(dir + "/" + name, j);
    std::cerr << "wrote " << dir << "/" << name << "\n";
  };
  dump("cavity.json", io::plant_to_json(fixtures::cavity()));
  json uncertain = io::plant_to_json(fixtures::cavity());
  json u;
  u["mu"] = 0.1;
  u["S"] = io::matrix_to_json(1.5 * Mat::Identity(2, 2));
  uncertain["uncertainty"] = u;
  dump("cavity_uncertain.json", uncertain);
  dump("cavity_measured.json", io::plant_to_json(fixtures::measured_cavity()));
  dump("amplifier_cavity.json", io::plant_to_json(fixtures::amplifier_cavity()));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear quantum stochastic system toolbox: physical realizability, "
               "H-infinity synthesis, controller realization, robustness analysis"};
  app.require_subcommand(1);

  CheckOptions check_opt;
  CLI::App* check = app.add_subcommand("check", "Commutation preservation and physical realizability");
  check->add_option("file", check_opt.file, "plant or system JSON file")->required();
  check->add_flag("--extract", check_opt.extract, "include Hamiltonian/coupling matrices");
  check->add_flag("--augment", check_opt.augment, "include the canonical augmentation");
  check->add_option("--report", check_opt.report_path, "write the JSON report to a file");

  SynthesizeOptions syn_opt;
  CLI::App* syn = app.add_subcommand("synthesize", "Two-Riccati H-infinity controller synthesis");
  syn->add_option("file", syn_opt.file, "plant JSON file")->required();
  syn->add_option("--g", syn_opt.g, "disturbance attenuation")->required();
  syn->add_option("--realize", syn_opt.realize, "quantum | classical | mixed:<nprime>");
  syn->add_option("--out", syn_opt.out_controller, "write the realized controller JSON");
  syn->add_option("--report", syn_opt.report_path, "write the JSON report to a file");
  syn->add_flag("--sweep-g", syn_opt.sweep, "bisect the feasibility frontier in g");

  AnalyzeOptions an_opt;
  CLI::App* an = app.add_subcommand("analyze", "Closed-loop analysis");
  an->require_subcommand(1);
  CLI::App* an_norm = an->add_subcommand("norm", "H-infinity norm via bisection");
  CLI::App* an_sbr = an->add_subcommand("sbr", "strict bounded real test");
  CLI::App* an_rob = an->add_subcommand("robust", "small-gain robust mean-square stability");
  CLI::App* an_sim = an->add_subcommand("simulate", "Gaussian moment trajectory (CSV)");
  for (CLI::App* sub : {an_norm, an_sbr, an_rob, an_sim}) {
    sub->add_option("--system", an_opt.system_file, "system JSON file (A,B,C,D)");
    sub->add_option("--plant", an_opt.plant_file, "plant JSON file");
    sub->add_option("--controller", an_opt.controller_file, "controller JSON file");
    sub->add_option("--report", an_opt.report_path, "write the JSON report to a file");
  }
  an_sbr->add_option("--g", an_opt.g, "attenuation level")->required();
  an_rob->add_option("--g", an_opt.g, "attenuation level")->required();
  an_rob->add_option("--grid", an_opt.grid, "structured delta sample count");
  an_sim->add_option("--signal", an_opt.signal_file, "piecewise-constant disturbance JSON");
  an_sim->add_option("--horizon", an_opt.horizon, "simulation horizon");
  an_sim->add_option("--dt", an_opt.dt, "step size (default auto)");
  an_sim->add_option("--out", an_opt.out_csv, "CSV output path (default stdout)");

  std::string fixtures_dir = ".";
  CLI::App* fix = app.add_subcommand("fixtures", "Write the bundled example plants");
  fix->add_option("--dir", fixtures_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitParseError;
  }

  try {
    if (check->parsed()) return run_check(check_opt);
    if (syn->parsed()) return run_synthesize(syn_opt);
    if (an->parsed()) {
      if (an_norm->parsed()) return run_analyze_norm(an_opt);
      if (an_sbr->parsed()) return run_analyze_sbr(an_opt);
      if (an_rob->parsed()) return run_analyze_robust(an_opt);
      if (an_sim->parsed()) return run_analyze_simulate(an_opt);
    }
    if (fix->parsed()) return run_fixtures(fixtures_dir);
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const qsynth::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitParseError;
}
