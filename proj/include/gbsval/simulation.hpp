#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gbsval/gaussian_input.hpp"
#include "gbsval/network.hpp"
#include "gbsval/observables.hpp"

namespace gbsval {

struct SimulationSetup {
    InputModel model;
    TransmissionMatrix network;
    std::size_t n_s = 65536;
    std::size_t n_r = kDefaultRepeats;
    std::uint64_t seed = 0;
    std::size_t chunk = 2048; // trajectories transformed per step

    std::size_t ensemble_size() const { return n_s * n_r; }
};

// Streams the ensemble of a setup through the network chunk by chunk, so
// ensembles of 10^6-10^7 trajectories never need to be held in memory.
// Repeats run concurrently; each repeat is accumulated serially, so results
// do not depend on the thread count. Trajectories match
// apply_network(network * model.t, sample_input_ensemble(model, n_s, n_r, seed)).
class Simulation {
  public:
    explicit Simulation(SimulationSetup setup);

    const SimulationSetup& setup() const { return setup_; }
    std::size_t output_modes() const { return network_.outputs(); }

    GcpEstimate gcp(const BinningSpec& spec) const;
    Estimate intensity_correlation(std::span<const int> orders) const;
    Estimate marginal_moment(std::span<const std::size_t> modes) const;
    Cumulants cumulants_low_order(std::size_t j, std::size_t k) const;
    // <pi_j(1)> for every output mode.
    std::vector<Estimate> click_rates() const;

    using ChunkVisitor = std::function<void(const AmplitudeEnsemble& chunk, std::uint64_t first_trajectory)>;
    // Visits the output chunks of one repeat in trajectory order.
    void for_each_chunk(std::size_t repeat, const ChunkVisitor& visit) const;

  private:
    SimulationSetup setup_;
    TransmissionMatrix network_; // with model.t applied
    QuadratureVariances variances_;
    bool classical_ = true;
};

} // namespace gbsval
