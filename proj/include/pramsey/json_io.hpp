#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

#include "pramsey/combinatorics.hpp"
#include "pramsey/constructions.hpp"
#include "pramsey/pipeline.hpp"
#include "pramsey/point_config.hpp"

namespace pramsey::io {

using json = nlohmann::json;

// Rationals travel as "p/q" strings (or "p" for integers), bit-exact.
json rat_to_json(const Rat& r);
Rat rat_from_json(const json& j);

json point_config_to_json(const PointConfig& c);
PointConfig point_config_from_json(const json& j);

json sq_matrix_to_json(const SquaredDistanceMatrix& m);
SquaredDistanceMatrix sq_matrix_from_json(const json& j);

json descriptor_to_json(const constructions::ConfigDescriptor& d);
constructions::ConfigDescriptor descriptor_from_json(const json& j);

json coloring_to_json(const combinatorics::Coloring& c);
combinatorics::Coloring coloring_from_json(const json& j);

json coloring_search_to_json(const combinatorics::ColoringSearchResult& r);
json congruence_map_to_json(const geometry::CongruenceMap& m);
json trace_to_json(const pipeline::PipelineTrace& t);
json certificate_to_json(const pipeline::PRamseyCertificate& c);

json params_to_json(const pipeline::PipelineParams& p);
pipeline::PipelineParams params_from_json(const json& j);

/// Canonical serialization: sorted keys (nlohmann's ordered map), two-space
/// indent, '\n' terminated. Reruns with equal inputs are byte-identical.
std::string canonical_dump(const json& j);

/// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string digest(const json& j);

json load_json_file(const std::string& path);

/// Write-to-temp-then-rename so partial output never lands at `path`.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace pramsey::io
