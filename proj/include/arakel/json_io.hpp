#pragma once

#include <string>

#include "json.hpp"

#include "arakel/adelic.hpp"
#include "arakel/energy.hpp"
#include "arakel/hessian.hpp"
#include "arakel/profile.hpp"
#include "arakel/tree.hpp"

namespace arakel {

struct SchemaError : std::runtime_error {
  SchemaError(const std::string& path, const std::string& what)
      : std::runtime_error("schema error at " + path + ": " + what) {}
};

// profile.json {"kind":"pl","breakpoints":["1/2"],"slopes":["0","1"],"anchor_value":"0"}
ConvexProfile profile_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json profile_to_json(const ConvexProfile& p);

// measure.json {"atoms":[["0","1"]],"density":[]} with density [breaks, values]
LineMeasure measure_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json measure_to_json(const LineMeasure& m);

// tuple.json {"d":1,"entries":[{"phi":[...],"psi":[...]}],"refs":["1","1"]}
AdditivePshTuple tuple_from_json(const nlohmann::json& j, const std::string& path);

// divisor.json {"points":[["0","1"]],"vertical":[["2","1"]],"green":{...},
//               "deviations":{"2":[{"center":"0","depth":"1","coeff":"1/2"}]}}
ModelArithDivisor divisor_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json divisor_to_json(const ModelArithDivisor& d);

// adelic.json {"sequence":[divisor...],"modulus_base":"1","modulus_ratio":"1/2"}
// or a bare divisor (treated as a constant sequence)
AdelicArithDivisor adelic_from_json(const nlohmann::json& j, const std::string& path,
                                    std::size_t constant_terms = 8);

// tree.json {"p":2,"leaves":["0","4","inf"]}
struct TreeInputJson {
  std::int64_t p;
  std::vector<ProjPoint> leaves;
};
TreeInputJson tree_from_json(const nlohmann::json& j, const std::string& path);
nlohmann::json tree_to_json(const BerkTree& t);

// fam.json {"g":2,"d":3,"Y0":[[...]],"ranks":[2,1],"blocks":[[[...]]],"alpha":[[...]]}
FlagFamily family_from_json(const nlohmann::json& j, const std::string& path);

ProjPoint projpoint_parse(const std::string& s);

}  // namespace arakel
