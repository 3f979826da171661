#pragma once

#include <memory>

#include "ppe/detector/backend.hpp"
#include "ppe/detector/scenario.hpp"

namespace ppe {

/// Serves the noisy detection stream of a scripted scenario.
class SyntheticBackend final : public DetectorBackend {
public:
    explicit SyntheticBackend(std::shared_ptr<const Scenario> scenario) : scenario_(std::move(scenario)) {}

    BackendCapabilities capabilities() const override { return {"synthetic", false}; }
    std::vector<Detection> detect(const Frame& frame) override { return scenario_->detections_at(frame.index()); }

private:
    std::shared_ptr<const Scenario> scenario_;
};

}  // namespace ppe
