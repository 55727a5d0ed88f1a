#pragma once

#include <stdexcept>
#include <string>

#include "flatkhinchin/vec.hpp"

namespace flatkhinchin {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MismatchedEdgeError : Error {
  using Error::Error;
};
struct UnpairedEdgeError : Error {
  using Error::Error;
};
struct DegenerateSurfaceError : Error {
  using Error::Error;
};
struct BadParameterError : Error {
  using Error::Error;
};
struct InvalidPointError : Error {
  using Error::Error;
};

/// A trajectory reached (or passed within eps_sing of) a cone point or a
/// marked point. Carries the hit time and location.
struct SingularityHitError : Error {
  double time;
  int poly;
  Vec2 pos;
  int vertex_class;
  SingularityHitError(double t, int p, Vec2 q, int cls)
      : Error("trajectory hit a singularity at t=" + std::to_string(t)),
        time(t),
        poly(p),
        pos(q),
        vertex_class(cls) {}
};

struct StepLimitError : Error {
  using Error::Error;
};
struct ExplosionGuardError : Error {
  using Error::Error;
};
struct NoCylindersError : Error {
  using Error::Error;
};
struct NoReturnError : Error {
  using Error::Error;
};
struct SingularEndpointError : Error {
  using Error::Error;
};
struct BadPerturbationError : Error {
  using Error::Error;
};
struct OverflowError : Error {
  using Error::Error;
};

struct HitBreakpointError : Error {
  long step;
  explicit HitBreakpointError(long s)
      : Error("orbit hit an exchange breakpoint at step " + std::to_string(s)),
        step(s) {}
};

}  // namespace flatkhinchin
