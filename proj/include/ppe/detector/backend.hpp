#pragma once

#include <string>
#include <vector>

#include "ppe/core/types.hpp"

namespace ppe {

struct BackendCapabilities {
    std::string name;
    bool supports_features = false;
};

/// A detection model seen from the pipeline: frames in, head boxes out.
///
/// Replay and synthetic backends are pure functions of the frame index and
/// may be called concurrently. Returned boxes are clipped to the frame.
class DetectorBackend {
public:
    virtual ~DetectorBackend() = default;

    virtual BackendCapabilities capabilities() const = 0;
    virtual std::vector<Detection> detect(const Frame& frame) = 0;
};

}  // namespace ppe
