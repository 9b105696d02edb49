#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "rdsync/family.hpp"
#include "rdsync/random.hpp"

namespace rdsync {

/// Addressable i.i.d. noise: value j of stream (seed, stream_id) is a pure
/// function of its coordinates.
class NoiseStream {
public:
    NoiseStream(const NoiseSpec& noise, std::uint64_t seed, std::uint64_t stream_id)
        : noise_(&noise), stream_(seed, stream_id)
    {
    }
    NoiseValue operator()(std::uint64_t j) const noexcept { return noise_->from_uniform(stream_.uniform(j)); }

private:
    const NoiseSpec* noise_;
    CounterStream stream_;
};

struct NoiseBlock {
    std::vector<NoiseValue> values;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

NoiseBlock sample_block(const NoiseSpec& noise, std::uint64_t seed, std::uint64_t stream_id, std::size_t n);

enum class Direction { Forward, Reverse };

/// positions[j] is the j-th iterate of x0:
///  Forward: f_{a_{j-1}} o ... o f_{a_0}(x0)
///  Reverse: f_{a_0} o ... o f_{a_{j-1}}(x0)
/// boxes[j], when present, is the bounding box of the same composition
/// applied to a probe cloud.
struct OrbitTrace {
    Direction direction = Direction::Forward;
    NoiseBlock block;
    std::vector<Point> positions;
    std::vector<Box> boxes;
    std::vector<bool> step_saturated;
    bool saturated = false;
};

OrbitTrace forward_orbit(const MapFamily& fam, const NoiseBlock& block, std::span<const double> x0,
                         std::span<const double> probe_points = {});
OrbitTrace reverse_orbit(const MapFamily& fam, const NoiseBlock& block, std::span<const double> x0,
                         std::span<const double> probe_points = {});

/// CSV: step, x_1..x_k, box_lo_1..k, box_hi_1..k, saturated (box columns only when boxes are present).
void write_orbit_csv(std::ostream& os, const OrbitTrace& trace);

/// Raised by callers that need a converged pullback limit.
class NotConverged : public DiagnosticError {
public:
    NotConverged(std::size_t n_max, double last_diameter);
    std::size_t n_max;
    double last_diameter;
};

struct PullbackResult {
    Point point;            ///< centroid of the probe image at the final depth
    std::size_t depth = 0;  ///< number of maps composed
    double diameter = 0.0;  ///< taxicab diameter of the probe image at that depth
    bool converged = false;
    bool saturated = false;
};

/// Deepens f_{w(0)} o f_{w(1)} o ... o f_{w(n-1)} applied to the probe cloud
/// until its image has taxicab diameter <= tol, for n = 1..n_max. `outer(i)`
/// supplies the i-th map from the outside; deeper compositions reuse the
/// same prefix. Fails softly (converged = false) at n_max.
PullbackResult pullback_limit(const MapFamily& fam, const std::function<NoiseValue(std::size_t)>& outer,
                              std::span<const double> probe_points, double tol, std::size_t n_max);

/// Pullback limit pi(omega) for the noise stream (seed, stream_id).
PullbackResult pullback_point(const MapFamily& fam, std::uint64_t seed, std::uint64_t stream_id,
                              std::span<const double> probe_points, double tol, std::size_t n_max);

} // namespace rdsync
