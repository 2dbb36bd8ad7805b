#pragma once

#include "tfstab/graph.hpp"
#include "tfstab/grid.hpp"
#include "tfstab/partition.hpp"
#include "tfstab/spectral.hpp"

#include <filesystem>
#include <string>

namespace tfstab {

/// Binary field container ("TFC1"): header { magic, u32 nx, u32 ny, f64 delta,
/// f64 x0, f64 y0, u8 kind }, then row-major (x-major) little-endian payload:
/// f64 (re, im) pairs for complex kinds, or f64 p followed by f64 weights for
/// kind = weight.
void write_field(const GaborField& f, const std::filesystem::path& path);
void write_weight_field(const WeightField& w, const std::filesystem::path& path);

/// Peek at the kind byte without loading the payload.
FieldKind probe_field_kind(const std::filesystem::path& path);
GaborField read_field(const std::filesystem::path& path);
WeightField read_weight_field(const std::filesystem::path& path);

/// Plot-friendly CSV: "x,y,re,im" or "x,y,w" rows with a header line.
void field_to_csv(const GaborField& f, const std::filesystem::path& path);
void weight_to_csv(const WeightField& w, const std::filesystem::path& path);

/// Edge list "i j weight" plus a vertex coordinate table, for external
/// inspection.
void export_graph(const WeightedGridGraph& g, const std::filesystem::path& edges_path,
                  const std::filesystem::path& vertices_path);

std::string cheeger_estimate_json(const CheegerEstimate& est);
std::string partition_report_json(const PartitionReport& report);

} // namespace tfstab
