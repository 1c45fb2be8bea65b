#pragma once

#include <json.hpp>
#include <string>

#include "idfunc/calibration.hpp"
#include "idfunc/distribution.hpp"
#include "idfunc/osband.hpp"
#include "idfunc/verifier.hpp"
#include "idfunc/zestimate.hpp"

namespace idfunc {

using Json = nlohmann::json;

/// Serialize with doubles printed at 17 significant digits (lossless
/// double round trip) and keys in sorted order, so equal inputs give
/// byte-identical output.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const ScalarDistribution& f);
Json to_json(const BivariateDistribution& f);
Json to_json(const AnyDistribution& f);
AnyDistribution distribution_from_json(const Json& j);
ScalarDistribution scalar_from_json(const Json& j);

Json to_json(const ZEstimate& e);
Json to_json(const TestReport& r);
Json to_json(const VerificationReport& r);
Json to_json(const LevelSetReport& r);
Json to_json(const EsWitness& w);
Json recovered_to_json(const RecoveredTransform& r, const Vec& x);

}  // namespace idfunc
