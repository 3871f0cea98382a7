#pragma once

#include <string>

#include "nullcone/field.hpp"

namespace nullcone {

enum class SnapshotFormat { Text, Binary };

/// Field snapshot file: one ASCII header line "nlat nlon lmax" followed by
/// the nlat*nlon node values in row-major (latitude-major) order, either as
/// whitespace-separated decimal text or as raw little-endian IEEE-754
/// doubles. Readers auto-detect the payload encoding from the byte count.
void write_snapshot(const ScalarField& f, const std::string& path,
                    SnapshotFormat format = SnapshotFormat::Text);

ScalarField read_snapshot(const std::string& path);

}  // namespace nullcone
