#include "pinball/geometry.hpp"

namespace pinball {

// Everything here is templated on the scalar type and lives in the header;
// this TU pins down both instantiations so template errors surface early.
template struct ParabolaT<Rational>;
template struct ParabolaT<BigFloat>;
template struct BallStateT<Rational>;
template struct BallStateT<BigFloat>;

} // namespace pinball
