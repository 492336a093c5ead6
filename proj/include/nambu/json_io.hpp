#pragma once

#include <json.hpp>

#include "nambu/flow.hpp"
#include "nambu/kernel.hpp"

namespace nambu {

using Json = nlohmann::ordered_json;

// Serializer with floating-point formatting fixed to 17 significant digits,
// so identical inputs produce byte-identical reports.
std::string dump_fixed(const Json& j, int indent = 2);

Json to_json(const ResidualReport& r);      // indices emitted 1-based
Json to_json(const KernelBasis& kb);
Json to_json(const SemiCasimirPair& p);
Json to_json(const DriftStat& d);
Json to_json(const SkewTensor3& t);         // tensor literal format, 1-based

} // namespace nambu
