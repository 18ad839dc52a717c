#include "gallery.hpp"

#include <utility>

namespace cli {

namespace {

constexpr const char* kSphereRConst = R"cfg(# free particle confined to the unit sphere
[chart]
coords = x y z

[metric]
euclidean = true

[constraint]
primitive = "sqrt(x^2 + y^2 + z^2)"

[integration]
h = 0.001
t_end = 6.283185307179586
q0 = 1 0 0
qdot0 = 0 1 0
monitor_r = "sqrt(x^2 + y^2 + z^2)"
monitor_speed = "sqrt(x_dot^2 + y_dot^2 + z_dot^2)"

[sampling]
lo = 0.6 -0.5 -0.5
hi = 1.4 0.5 0.5
budget = 32
seed = 7
)cfg";

constexpr const char* kSphereREqualsT = R"cfg(# point forced radially outward at unit rate: r(t) = r0 + t
[chart]
coords = x y z

[metric]
euclidean = true

[time]
tau_1 = "x / sqrt(x^2 + y^2 + z^2)"
tau_2 = "y / sqrt(x^2 + y^2 + z^2)"
tau_3 = "z / sqrt(x^2 + y^2 + z^2)"
primitive = "sqrt(x^2 + y^2 + z^2)"

[integration]
h = 0.001
t_end = 1
q0 = 1 0 0
qdot0 = 1 1 0
monitor_r = "sqrt(x^2 + y^2 + z^2)"

[sampling]
lo = 0.6 -0.5 -0.5
hi = 1.6 0.5 0.5
budget = 32
seed = 9
)cfg";

constexpr const char* kFrameTranslation = R"cfg(# uniformly translating frame on the euclidean plane
[chart]
coords = t x y

[metric]
euclidean = true

[frame]
builtin = translation
direction = 1 0

[integration]
h = 0.001
t_end = 1
q0 = 0 0 0
qdot0 = 1 1 0

[sampling]
lo = -2 -2
hi = 2 2
budget = 64
seed = 11
)cfg";

constexpr const char* kFrameRotation = R"cfg(# uniformly rotating frame on the euclidean plane
[chart]
coords = t x y

[metric]
euclidean = true

[frame]
builtin = rotation
rate = 1

# a point at rest in the target appears as (cos t, -sin t) in this frame
[integration]
h = 0.001
t_end = 1
q0 = 0 1 0
qdot0 = 1 0 -1

[sampling]
lo = -2 -2
hi = 2 2
budget = 64
seed = 13
)cfg";

constexpr const char* kFrameDilatation = R"cfg(# exponentially dilating frame on the euclidean plane
[chart]
coords = t x y

[metric]
euclidean = true

[frame]
builtin = dilatation
rate = 1

[integration]
h = 0.001
t_end = 1
q0 = 0 1 0
qdot0 = 1 0 0

[sampling]
lo = -2 -2
hi = 2 2
budget = 64
seed = 17
)cfg";

constexpr const char* kOscillator = R"cfg(# unit-frequency harmonic oscillator
[chart]
coords = x

[metric]
euclidean = true

[force]
potential = "0.5 * x^2"

[integration]
h = 0.001
t_end = 62.83185307179586
q0 = 1
qdot0 = 0

[sampling]
lo = -1.5
hi = 1.5
budget = 32
seed = 21
)cfg";

constexpr const char* kMovingWire = R"cfg(# holonomic constraint whose leaf moves with time: x = t*y on the leaf B = 0
[chart]
coords = t x y

[metric]
euclidean = true

[time]
exact = "dt"

[constraint]
primitive = "x - t*y"

[integration]
h = 0.001
t_end = 1
q0 = 0 0 1
qdot0 = 1 1 0.3
monitor_B = "x - t*y"

[sampling]
lo = -1 -1 0.5
hi = 1 1 1.5
budget = 32
seed = 23
)cfg";

constexpr std::pair<const char*, const char*> kGallery[] = {
    {"sphere_r_const", kSphereRConst},
    {"sphere_r_equals_t", kSphereREqualsT},
    {"frame_translation", kFrameTranslation},
    {"frame_rotation", kFrameRotation},
    {"frame_dilatation", kFrameDilatation},
    {"oscillator", kOscillator},
    {"moving_wire", kMovingWire},
};

}  // namespace

const char* gallery_config(const std::string& name) {
  for (const auto& [n, text] : kGallery)
    if (name == n) return text;
  return nullptr;
}

std::vector<std::string> gallery_names() {
  std::vector<std::string> out;
  for (const auto& [n, text] : kGallery) out.emplace_back(n);
  return out;
}

}  // namespace cli
