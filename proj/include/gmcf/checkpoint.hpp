#pragma once

#include <string>

#include "gmcf/flow_sphere.hpp"
#include "gmcf/flow_torus.hpp"

namespace gmcf {

/// Text checkpoints: a small header (spec, shape, winding/boundary, time)
/// followed by full-precision decimal values in row-major order. Files are
/// written atomically (temp file + rename).
void save_checkpoint(const std::string& path, const FlowState& state);
void save_checkpoint(const std::string& path, const ProfileState& state);

enum class CheckpointKind { torus, sphere_equivariant, cloud, unknown };
CheckpointKind checkpoint_kind(const std::string& path);

FlowState load_torus_checkpoint(const std::string& path);
ProfileState load_sphere_checkpoint(const std::string& path);

}  // namespace gmcf
