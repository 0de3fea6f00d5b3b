#pragma once

#include "swfem/mesh/mesh.hpp"

namespace swfem {

/// Contravariant Piola transform v = J v_ref / det J. Preserves normal
/// fluxes through edges, so H(div) conformity survives the mapping.
/// Throws ElementError for degenerate cells (det J <= 0).
Vec2 piola_map(const CellGeometry& cell, const Vec2& ref_value);

/// div v = div_ref v_ref / det J for the Piola-mapped field.
double piola_divergence(const CellGeometry& cell, double ref_divergence);

/// v_ref = det J J^{-1} v.
Vec2 inverse_piola_map(const CellGeometry& cell, const Vec2& value);

/// Physical gradient of a pulled-back scalar: J^{-T} grad_ref.
inline Vec2 physical_gradient(const CellGeometry& cell, const Vec2& ref_gradient) {
    return cell.inverse_jacobian.transpose() * ref_gradient;
}

/// Counterclockwise rotation by 90 degrees: w^perp = z x w.
inline Vec2 perp(const Vec2& w) { return {-w.y(), w.x()}; }

}  // namespace swfem
