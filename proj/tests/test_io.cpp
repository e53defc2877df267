#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "qsynth/fixtures.hpp"
#include "qsynth/io.hpp"
#include "qsynth/realization.hpp"

using namespace qsynth;
using qsynth::io::json;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/qsynth_io_test_") + name;
}

}  // namespace

TEST_CASE("matrix serialization round trip") {
  Mat m(2, 3);
  m << 1.0, -2.5, 3.0e-7, 0.0, 1.0 / 3.0, -0.0;
  const json j = io::matrix_to_json(m);
  const Mat back = io::matrix_from_json(j);
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);

  // significant-digit rounding for reports
  const json sig = io::matrix_to_json_sig(m, 12);
  const Mat rounded = io::matrix_from_json(sig);
  CHECK((m - rounded).cwiseAbs().maxCoeff() < 1e-11 * m.cwiseAbs().maxCoeff());

  CHECK_THROWS_AS(io::matrix_from_json(json::parse("[[1,2],[3]]")), io::ParseError);
  CHECK_THROWS_AS(io::matrix_from_json(json::parse("5")), io::ParseError);
}

TEST_CASE("plant serialization is a fixed point") {
  for (const Plant& p : {fixtures::cavity(), fixtures::measured_cavity(),
                         fixtures::amplifier_cavity()}) {
    const json j = io::plant_to_json(p);
    const Plant q = io::plant_from_json(j);
    const json j2 = io::plant_to_json(q);
    CHECK(j.dump(2) == j2.dump(2));
    CHECK((p.A - q.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((p.Fv.S - q.Fv.S).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("qsde serialization") {
  LinearQsde sys;
  sys.A = -1.5 * Mat::Identity(2, 2);
  sys.B = Mat::Ones(2, 4);
  sys.C = Mat::Identity(2, 2);
  sys.D = Mat::Zero(2, 4);
  sys.D.leftCols(2) = Mat::Identity(2, 2);
  sys.theta = CommutationMatrix::canonical(2);
  sys.ito = canonical_ito(4);
  sys.output_channel_offset = 0;
  const json j = io::qsde_to_json(sys);
  CHECK(io::looks_like_plant(j) == false);
  const LinearQsde back = io::qsde_from_json(j);
  CHECK((back.B - sys.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.ito.is_canonical());
}

TEST_CASE("controller serialization keeps the noise interface") {
  ControllerTriple t;
  t.A_K = -1.1 * Mat::Identity(2, 2);
  t.B_K = -0.447 * Mat::Identity(2, 2);
  t.C_K = -0.447 * Mat::Identity(2, 2);
  const FullController c = realize_quantum_controller(t);
  const json j = io::controller_to_json(c);
  const FullController back = io::controller_from_json(j);
  CHECK((back.B_K1 - c.B_K1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.B_K0 - c.B_K0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.theta_K.canonical_form());
  CHECK(back.F_vK.is_canonical());
}

TEST_CASE("dimension mismatches are parse errors") {
  json j = io::plant_to_json(fixtures::cavity());
  j["matrices"]["B1"] = io::matrix_to_json(Mat::Zero(3, 2));
  CHECK_THROWS_AS(io::plant_from_json(j), io::ParseError);

  json k = io::plant_to_json(fixtures::cavity());
  k["matrices"].erase("C2");
  CHECK_THROWS_AS(io::plant_from_json(k), io::ParseError);
}

TEST_CASE("malformed files carry a position") {
  const std::string path = temp_path("malformed.json");
  {
    std::ofstream out(path);
    out << "{ \"n\": 2, ";
  }
  try {
    io::load_json_file(path);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
  std::remove(path.c_str());

  CHECK_THROWS_AS(io::load_json_file("/nonexistent/file.json"), io::ParseError);
}

TEST_CASE("ito spec forms") {
  CHECK(io::ito_from_json(json("canonical"), 4, "w").is_canonical());
  json j;
  j["S"] = io::matrix_to_json(2.0 * Mat::Identity(2, 2));
  j["Tim"] = io::matrix_to_json(Mat::Zero(2, 2));
  const ItoMatrix f = io::ito_from_json(j, 2, "w");
  CHECK(f.S(0, 0) == 2.0);
  CHECK_THROWS_AS(io::ito_from_json(json("diagonal"), 4, "w"), io::ParseError);
  CHECK_THROWS_AS(io::ito_from_json(j, 4, "w"), io::ParseError);
}

TEST_CASE("signal parsing") {
  json j;
  j["horizon"] = 10.0;
  j["segments"] = json::array();
  json s1;
  s1["t"] = 0.0;
  s1["value"] = {1.0, 0.0};
  json s2;
  s2["t"] = 5.0;
  s2["value"] = {0.0, -1.0};
  j["segments"].push_back(s1);
  j["segments"].push_back(s2);
  const InputSignal sig = io::signal_from_json(j, 2);
  CHECK(sig.value(2.0)(0) == 1.0);
  CHECK(sig.value(7.0)(1) == -1.0);
  CHECK_THROWS_AS(io::signal_from_json(j, 3), io::ParseError);
}

TEST_CASE("trajectory csv has a header and full rows") {
  GaussianState s0;
  s0.mean = Vec::Ones(2);
  s0.cov = Mat::Identity(2, 2);
  const Trajectory traj =
      propagate_moments(-Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(2, 0),
                        classical_ito(1), s0, InputSignal::zero(1, 0.5), 0.1);
  std::ostringstream os;
  io::write_trajectory_csv(os, traj);
  const std::string text = os.str();
  CHECK(text.rfind("t,mean_0,mean_1,cov_0_0,cov_0_1,cov_1_1", 0) == 0);
  const size_t lines = std::count(text.begin(), text.end(), '\n');
  CHECK(lines == traj.times.size() + 1);
}
