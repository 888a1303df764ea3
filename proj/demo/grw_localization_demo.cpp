// Spontaneous localization in one picture: start a symmetric two-packet
// state, run a single stochastic trajectory, and print where the hits
// landed and how sharply each one narrowed the wavefunction.

#include <cstdio>

#include "entime/grw.hpp"

using namespace entime;

int main() {
    const int n = 101;
    grw::GridWavefunction left = grw::GridWavefunction::gaussian(-10.0, 10.0, n, -3.0, 1.0);
    grw::GridWavefunction right = grw::GridWavefunction::gaussian(-10.0, 10.0, n, 3.0, 1.0);
    grw::GridWavefunction psi = left;
    psi.values = (left.values + right.values) / std::sqrt(2.0);
    psi = psi.normalized();

    grw::HittingParams params{/*rate=*/2.0, /*alpha=*/1.0, /*seed=*/7};
    Matrix h = grw::free_particle_hamiltonian(n, psi.dx);
    grw::Trajectory traj = grw::run_trajectory(psi, params, h, /*t_end=*/3.0);

    std::printf("trajectory with %zu hits over t = 3:\n", traj.hit_times.size());
    for (std::size_t k = 0; k < traj.hit_times.size(); ++k) {
        const grw::GridWavefunction& state = traj.states[k];
        double mean = 0.0, second = 0.0;
        for (int i = 0; i < state.n_points; ++i) {
            double w = std::norm(state.values[i]) * state.dx;
            mean += state.x(i) * w;
            second += state.x(i) * state.x(i) * w;
        }
        std::printf("  t = %6.3f  center = %+7.3f  <x> = %+7.3f  var = %6.3f\n",
                    traj.hit_times[k], traj.hit_centers[k], mean,
                    second - mean * mean);
    }
    if (traj.hit_times.empty())
        std::printf("  (no hits drawn at this seed; raise rate or t_end)\n");
    return 0;
}
