#pragma once

#include <string>

#include <json.hpp>

#include "qsynth/momentsim.hpp"
#include "qsynth/synthesis.hpp"

namespace qsynth::io {

using json = nlohmann::ordered_json;

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

json matrix_to_json(const Mat& m);
// Rounded to `digits` significant figures, for report files.
json matrix_to_json_sig(const Mat& m, int digits = 12);
Mat matrix_from_json(const json& j);
Mat matrix_from_json(const json& j, int rows, int cols, const std::string& name);

json ito_to_json(const ItoMatrix& f);
ItoMatrix ito_from_json(const json& j, int expected_dim, const std::string& name);

json theta_to_json(const CommutationMatrix& cm);
CommutationMatrix theta_from_json(const json& j, int n);

json plant_to_json(const Plant& p);
Plant plant_from_json(const json& j);

json qsde_to_json(const LinearQsde& s);
LinearQsde qsde_from_json(const json& j);

json controller_to_json(const FullController& c);
FullController controller_from_json(const json& j);

InputSignal signal_from_json(const json& j, int dim);

// A plant file contains "matrices.B0"; a system file contains "matrices.B".
bool looks_like_plant(const json& j);

json load_json_file(const std::string& path);  // ParseError carries the byte position
void save_json_file(const std::string& path, const json& j);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace qsynth::io
