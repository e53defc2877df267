#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsynth/fixtures.hpp"
#include "qsynth/io.hpp"
#include "qsynth/momentsim.hpp"
#include "qsynth/realization.hpp"
#include "qsynth/robustness.hpp"

namespace py = pybind11;
using namespace qsynth;

namespace {

CommutationMatrix theta_arg(const py::object& spec, int n) {
  if (spec.is_none() || py::cast<std::string>(py::str(spec)) == "canonical") {
    return CommutationMatrix::canonical(n);
  }
  if (py::isinstance<py::int_>(spec)) {
    return CommutationMatrix::degenerate(n, py::cast<int>(spec));
  }
  return CommutationMatrix::from_matrix(py::cast<Mat>(spec));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear quantum stochastic systems: physical realizability, "
            "H-infinity synthesis, controller realization, robustness";

  py::register_exception<Error>(m, "QsynthError");

  py::class_<CommutationMatrix>(m, "CommutationMatrix")
      .def_static("canonical", &CommutationMatrix::canonical, py::arg("n"))
      .def_static("degenerate", &CommutationMatrix::degenerate, py::arg("n"), py::arg("nprime"))
      .def_static("from_matrix", &CommutationMatrix::from_matrix, py::arg("theta"),
                  py::arg("tol") = kStructuralTol)
      .def_readonly("n", &CommutationMatrix::n)
      .def_readonly("nprime", &CommutationMatrix::nprime)
      .def_readonly("theta", &CommutationMatrix::theta)
      .def_property_readonly("canonical_form", &CommutationMatrix::canonical_form);

  py::class_<ItoMatrix>(m, "ItoMatrix")
      .def(py::init([](const Mat& S, const Mat& Tim) {
             ItoMatrix f;
             f.n_w = static_cast<int>(S.rows());
             f.S = S;
             f.Tim = Tim;
             return f;
           }),
           py::arg("S"), py::arg("Tim"))
      .def_readonly("S", &ItoMatrix::S)
      .def_readonly("Tim", &ItoMatrix::Tim)
      .def_property_readonly("F", &ItoMatrix::F)
      .def("is_canonical", &ItoMatrix::is_canonical, py::arg("tol") = kStructuralTol);
  m.def("canonical_ito", &canonical_ito, py::arg("n_w"));
  m.def("classical_ito", &classical_ito, py::arg("n_w"));
  m.def("ito_decompose", &ito_decompose, py::arg("F"), py::arg("tol") = kStructuralTol);

  py::class_<LinearQsde>(m, "LinearQsde")
      .def(py::init([](const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                       const py::object& theta, const py::object& ito, int offset) {
             LinearQsde sys;
             sys.A = A;
             sys.B = B;
             sys.C = C;
             sys.D = D;
             sys.theta = theta_arg(theta, static_cast<int>(A.rows()));
             sys.ito = ito.is_none() ? canonical_ito(static_cast<int>(B.cols()))
                                     : py::cast<ItoMatrix>(ito);
             sys.output_channel_offset = offset;
             sys.validate();
             return sys;
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"),
           py::arg("theta") = py::none(), py::arg("ito") = py::none(),
           py::arg("output_channel_offset") = 0)
      .def_readonly("A", &LinearQsde::A)
      .def_readonly("B", &LinearQsde::B)
      .def_readonly("C", &LinearQsde::C)
      .def_readonly("D", &LinearQsde::D)
      .def_readonly("theta", &LinearQsde::theta)
      .def_readonly("ito", &LinearQsde::ito);

  py::class_<CommutationCheck>(m, "CommutationCheck")
      .def_readonly("holds", &CommutationCheck::holds)
      .def_readonly("residual", &CommutationCheck::residual);
  m.def("preserves_commutation", &preserves_commutation, py::arg("sys"),
        py::arg("tol") = kResidualTol);
  m.def("commutation_ode_oracle", &commutation_ode_oracle, py::arg("sys"), py::arg("horizon"),
        py::arg("steps") = 0);

  py::class_<OscillatorParams>(m, "OscillatorParams")
      .def(py::init([](const Mat& R, const CMat& Lambda) {
             return OscillatorParams{R, Lambda};
           }),
           py::arg("R"), py::arg("Lambda"))
      .def_readonly("R", &OscillatorParams::R)
      .def_readonly("Lambda", &OscillatorParams::Lambda);

  py::class_<RealizabilityReport>(m, "RealizabilityReport")
      .def_readonly("realizable", &RealizabilityReport::realizable)
      .def_readonly("residual_A", &RealizabilityReport::residual_A)
      .def_readonly("residual_B", &RealizabilityReport::residual_B)
      .def_readonly("d_conforms", &RealizabilityReport::d_conforms)
      .def_readonly("tol", &RealizabilityReport::tol)
      .def_readonly("params", &RealizabilityReport::params);
  m.def("check_physical_realizability", &check_physical_realizability, py::arg("sys"));
  m.def("extract_hamiltonian_coupling", &extract_hamiltonian_coupling, py::arg("sys"));
  m.def("build_oscillator", &build_oscillator, py::arg("params"), py::arg("n_y"),
        py::arg("theta"));

  py::class_<Plant>(m, "Plant")
      .def(py::init([](const Mat& A, const Mat& B0, const Mat& B1, const Mat& B2, const Mat& C1,
                       const Mat& D12, const Mat& C2, const Mat& D20, const Mat& D21,
                       const py::object& Fv, const py::object& Fw, const py::object& theta) {
             Plant p;
             p.A = A;
             p.B0 = B0;
             p.B1 = B1;
             p.B2 = B2;
             p.C1 = C1;
             p.D12 = D12;
             p.C2 = C2;
             p.D20 = D20;
             p.D21 = D21;
             p.Fv = Fv.is_none() ? canonical_ito(p.n_v()) : py::cast<ItoMatrix>(Fv);
             p.Fw = Fw.is_none() ? canonical_ito(p.n_w()) : py::cast<ItoMatrix>(Fw);
             p.thetaP = theta_arg(theta, p.n());
             p.validate();
             return p;
           }),
           py::arg("A"), py::arg("B0"), py::arg("B1"), py::arg("B2"), py::arg("C1"),
           py::arg("D12"), py::arg("C2"), py::arg("D20"), py::arg("D21"),
           py::arg("Fv") = py::none(), py::arg("Fw") = py::none(),
           py::arg("theta") = py::none())
      .def_readonly("A", &Plant::A)
      .def_readonly("B1", &Plant::B1)
      .def_readonly("C1", &Plant::C1);

  py::class_<ControllerTriple>(m, "ControllerTriple")
      .def(py::init([](const Mat& A_K, const Mat& B_K, const Mat& C_K) {
             return ControllerTriple{A_K, B_K, C_K};
           }),
           py::arg("A_K"), py::arg("B_K"), py::arg("C_K"))
      .def_readonly("A_K", &ControllerTriple::A_K)
      .def_readonly("B_K", &ControllerTriple::B_K)
      .def_readonly("C_K", &ControllerTriple::C_K);

  py::class_<FullController>(m, "FullController")
      .def_readonly("A_K", &FullController::A_K)
      .def_readonly("B_K", &FullController::B_K)
      .def_readonly("C_K", &FullController::C_K)
      .def_readonly("B_K0", &FullController::B_K0)
      .def_readonly("B_K1", &FullController::B_K1)
      .def_readonly("theta_K", &FullController::theta_K)
      .def_readonly("F_vK", &FullController::F_vK)
      .def_readonly("oscillator", &FullController::oscillator)
      .def("as_qsde", &FullController::as_qsde, py::arg("F_y"));

  py::class_<CareSolution>(m, "CareSolution")
      .def_readonly("X", &CareSolution::X)
      .def_readonly("residual", &CareSolution::residual)
      .def_readonly("closed_loop_eigs", &CareSolution::closed_loop_eigs)
      .def_readonly("stabilizing", &CareSolution::stabilizing);
  m.def(
      "solve_care",
      [](const Mat& A, const Mat& Mq, const Mat& Q) {
        return solve_care(CareProblem{A, Mq, Q});
      },
      py::arg("A"), py::arg("Mq"), py::arg("Q"));
  m.def("hinf_norm", &hinf_norm, py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"),
        py::arg("tol") = 1e-9);
  m.def("solve_lyapunov", &solve_lyapunov, py::arg("A"), py::arg("Q"));

  py::class_<SbrResult>(m, "SbrResult")
      .def_readonly("holds", &SbrResult::holds)
      .def_readonly("X", &SbrResult::X);
  m.def("strict_bounded_real_check", &strict_bounded_real_check, py::arg("A"), py::arg("B"),
        py::arg("C"), py::arg("D"), py::arg("g"));

  py::class_<A1Report>(m, "A1Report")
      .def_readonly("e1_positive", &A1Report::e1_positive)
      .def_readonly("e2_positive", &A1Report::e2_positive)
      .def_readonly("pencil_12_full_rank", &A1Report::pencil_12_full_rank)
      .def_readonly("pencil_21_full_rank", &A1Report::pencil_21_full_rank)
      .def("all", &A1Report::all);

  py::class_<A2Report>(m, "A2Report")
      .def_readonly("x_stabilizing", &A2Report::x_stabilizing)
      .def_readonly("y_stabilizing", &A2Report::y_stabilizing)
      .def_readonly("rho_xy", &A2Report::rho_xy)
      .def("all", &A2Report::all);

  py::class_<DissipationCertificate>(m, "DissipationCertificate")
      .def_readonly("X", &DissipationCertificate::X)
      .def_readonly("lambda0", &DissipationCertificate::lambda0)
      .def_readonly("strict", &DissipationCertificate::strict)
      .def_readonly("epsilon", &DissipationCertificate::epsilon);

  py::class_<SynthesisResult>(m, "SynthesisResult")
      .def_property_readonly("status",
                             [](const SynthesisResult& r) { return to_string(r.status); })
      .def("ok", &SynthesisResult::ok)
      .def_readonly("a1", &SynthesisResult::a1)
      .def_readonly("a2", &SynthesisResult::a2)
      .def_property_readonly("X",
                             [](const SynthesisResult& r) {
                               return r.X ? py::cast(r.X->X) : py::object(py::none());
                             })
      .def_property_readonly("Y",
                             [](const SynthesisResult& r) {
                               return r.Y ? py::cast(r.Y->X) : py::object(py::none());
                             })
      .def_readonly("triple", &SynthesisResult::triple)
      .def_readonly("certificate", &SynthesisResult::certificate);
  m.def("synthesize", &synthesize, py::arg("plant"), py::arg("g"));
  m.def("check_assumption_a1", &check_assumption_a1, py::arg("plant"));
  m.def(
      "solve_riccati_X", [](const Plant& p, double g) { return solve_riccati_X(p, g); },
      py::arg("plant"), py::arg("g"));
  m.def(
      "solve_riccati_Y", [](const Plant& p, double g) { return solve_riccati_Y(p, g); },
      py::arg("plant"), py::arg("g"));
  m.def("controller_triple", &controller_triple, py::arg("plant"), py::arg("g"), py::arg("X"),
        py::arg("Y"));

  py::class_<ClosedLoop>(m, "ClosedLoop")
      .def_readonly("Atil", &ClosedLoop::Atil)
      .def_readonly("Btil", &ClosedLoop::Btil)
      .def_readonly("Gtil", &ClosedLoop::Gtil)
      .def_readonly("Ctil", &ClosedLoop::Ctil)
      .def_readonly("Htil", &ClosedLoop::Htil)
      .def_readonly("F_combined", &ClosedLoop::F_combined);
  m.def("close_loop", &close_loop, py::arg("plant"), py::arg("controller"));
  m.def("controller_shell", &FullController::shell, py::arg("triple"), py::arg("n_y"));

  py::class_<RealizationChoice>(m, "RealizationChoice")
      .def(py::init<>())
      .def_readwrite("xi_shift_margin", &RealizationChoice::xi_shift_margin)
      .def_readwrite("min_n_vK", &RealizationChoice::min_n_vK);
  m.def("realize_quantum_controller", &realize_quantum_controller, py::arg("triple"),
        py::arg("choice") = RealizationChoice{});
  m.def(
      "realize_classical_controller",
      [](const ControllerTriple& t, const py::object& F_y) {
        return F_y.is_none() ? realize_classical_controller(t)
                             : realize_classical_controller(t, py::cast<ItoMatrix>(F_y));
      },
      py::arg("triple"), py::arg("F_y") = py::none());
  m.def("realize_mixed_controller", &realize_mixed_controller, py::arg("triple"),
        py::arg("theta_K"), py::arg("choice") = RealizationChoice{});
  m.def("check_compatibility", &check_compatibility, py::arg("controller"),
        py::arg("tol") = kStructuralTol);

  py::class_<UncertainPlant>(m, "UncertainPlant")
      .def_readonly("nominal", &UncertainPlant::nominal)
      .def_readonly("augmented", &UncertainPlant::augmented)
      .def_readonly("Btil1", &UncertainPlant::Btil1)
      .def_readonly("Ctil1", &UncertainPlant::Ctil1);
  m.def("overbound_uncertainty", &overbound_uncertainty, py::arg("plant"), py::arg("mu"),
        py::arg("S"), py::arg("g"));
  py::class_<RobustnessReport>(m, "RobustnessReport")
      .def_readonly("certified", &RobustnessReport::certified)
      .def_readonly("channel_norm", &RobustnessReport::channel_norm)
      .def_readonly("worst_margin", &RobustnessReport::worst_margin)
      .def_readonly("structured_margins", &RobustnessReport::structured_margins);
  m.def("robust_stability_check", &robust_stability_check, py::arg("closed_loop"), py::arg("g"),
        py::arg("grid") = 11);

  m.def("cavity_plant", &fixtures::cavity);
  m.def("uncertain_cavity_plant", [](double g) { return fixtures::uncertain_cavity(g); },
        py::arg("g") = 0.1);
  m.def("measured_cavity_plant", &fixtures::measured_cavity);
  m.def("amplifier_cavity_plant", &fixtures::amplifier_cavity);
}
