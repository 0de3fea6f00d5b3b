#pragma once

#include <string>
#include <utility>
#include <vector>

#include "swfem/fem/function_space.hpp"

namespace swfem {

/// Write fields on one mesh as a legacy ASCII VTK unstructured grid. Every
/// cell is split into four triangles through its edge midpoints, with
/// unshared points so discontinuities survive. Each field appears twice:
/// as point data at the six sub-vertices of its cell and as cell data at
/// the sub-triangle centroids. Vector fields get a zero z component.
/// Throws IoError on write failure.
void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<std::pair<std::string, Field>>& fields,
               const std::string& title = "swfem");

}  // namespace swfem
