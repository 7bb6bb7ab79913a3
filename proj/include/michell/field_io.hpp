#pragma once

// Field snapshots. Binary layout (little-endian):
//   char[4] magic "MSF1" (stress) or "MVF1" (vector)
//   u32 n, u32 cells[n], f64 spacing[n], f64 origin[n]
//   component arrays in slot order as f64, each sized by its lattice.
// CSV: one row per lattice point "component,x,y[,z],value".

#include <string>

#include "michell/grid.hpp"

namespace michell {

void write_field_binary(const std::string& path, const StressField& f);
void write_field_binary(const std::string& path, const VectorField& f);
StressField read_stress_binary(const std::string& path);
VectorField read_vector_binary(const std::string& path);

void write_field_csv(const std::string& path, const StressField& f);
void write_field_csv(const std::string& path, const VectorField& f);

}  // namespace michell
