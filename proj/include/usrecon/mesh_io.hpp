#pragma once

#include <optional>
#include <string>

#include "usrecon/extraction.hpp"
#include "usrecon/geometry.hpp"

namespace usrecon {

// Optional physical-scale annotation: maps unit-cube coordinates back to
// millimeters via p_mm = (p - translation) / scale of the recorded
// normalization transform.
struct MeshScaleInfo {
    SimilarityTransform unit_from_mm;
};

void write_ply(const std::string& path, const TriangleMesh& mesh,
               const std::optional<MeshScaleInfo>& scale = std::nullopt);
void write_obj(const std::string& path, const TriangleMesh& mesh,
               const std::optional<MeshScaleInfo>& scale = std::nullopt);

TriangleMesh read_ply(const std::string& path, std::optional<MeshScaleInfo>* scale = nullptr);

}  // namespace usrecon
