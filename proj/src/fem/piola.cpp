#include "swfem/fem/piola.hpp"

#include "swfem/error.hpp"

namespace swfem {

namespace {
void require_nondegenerate(const CellGeometry& cell) {
    if (!(cell.det > 0.0)) throw ElementError("degenerate_cell", "Piola map on a cell with det J <= 0");
}
}  // namespace

Vec2 piola_map(const CellGeometry& cell, const Vec2& ref_value) {
    require_nondegenerate(cell);
    return cell.jacobian * ref_value / cell.det;
}

double piola_divergence(const CellGeometry& cell, double ref_divergence) {
    require_nondegenerate(cell);
    return ref_divergence / cell.det;
}

Vec2 inverse_piola_map(const CellGeometry& cell, const Vec2& value) {
    require_nondegenerate(cell);
    return cell.det * (cell.inverse_jacobian * value);
}

}  // namespace swfem
