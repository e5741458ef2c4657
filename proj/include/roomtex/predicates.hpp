#pragma once

#include "roomtex/math.hpp"

namespace roomtex {

// Exact-sign geometric predicates: fast double-precision evaluation guarded by
// a forward error bound, falling back to exact rational arithmetic when the
// result is too close to zero to trust.

// > 0 if a,b,c make a left turn (CCW), < 0 right turn, 0 collinear.
int orient2d(const Vec2& a, const Vec2& b, const Vec2& c);

// > 0 if d lies strictly inside the circumcircle of CCW triangle (a,b,c),
// < 0 strictly outside, 0 cocircular.
int incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

}  // namespace roomtex
