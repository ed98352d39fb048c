#include "rffi/signal/device.hpp"

#include <cmath>
#include <random>

namespace rffi::signal {

void DeviceProfile::validate() const {
    require_config(!device_id.empty(), "device_id must be nonempty");
    require_config(pa_params.beta_a > 0.0, "beta_a must be positive");
    require_config(pa_params.alpha_a > 0.0, "alpha_a must be positive");
}

double drive_amplitude(double tx_power_dbm) {
    return kDriveReferenceAmplitude * std::pow(10.0, (tx_power_dbm - kDriveReferenceDbm) / 20.0);
}

BasebandSignal apply_pa(const BasebandSignal& signal, const DeviceProfile& dev, const PowerLevel& p) {
    require(!signal.samples.empty(), "apply_pa: empty signal");
    dev.validate();
    const double drive = drive_amplitude(p.tx_power_dbm);

    BasebandSignal out;
    out.sample_rate = signal.sample_rate;
    out.samples.resize(signal.samples.size());
    for (std::size_t n = 0; n < signal.samples.size(); ++n) {
        const cplx v = signal.samples[n] * drive;
        const double r = std::abs(v);
        if (r == 0.0) {
            out.samples[n] = cplx{0.0, 0.0};
            continue;
        }
        const double gain = dev.pa_params.am_am(r) / r;
        const double rot = dev.pa_params.am_pm(r);
        out.samples[n] = v * std::polar(gain, rot);
    }
    return out;
}

std::vector<DeviceProfile> sample_device_population(std::size_t n, std::uint64_t seed,
                                                    const std::string& id_prefix,
                                                    double perturbation_bound) {
    require(n >= 1, "population size must be >= 1");
    require_config(perturbation_bound >= 0.0 && perturbation_bound <= 0.1,
                   "perturbation bound must be in [0, 0.1] to keep amplifiers monotone");

    const SalehParams nominal{};
    std::vector<DeviceProfile> devices;
    devices.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t dev_seed = derive_seed(seed, "device", {i});
        std::mt19937_64 rng(dev_seed);
        std::uniform_real_distribution<double> delta(-perturbation_bound, perturbation_bound);

        DeviceProfile dev;
        char suffix[8];
        std::snprintf(suffix, sizeof(suffix), "%02zu", i);
        dev.device_id = id_prefix + suffix;
        dev.perturbation_seed = dev_seed;
        dev.pa_params.alpha_a = nominal.alpha_a * (1.0 + delta(rng));
        dev.pa_params.beta_a = nominal.beta_a * (1.0 + delta(rng));
        dev.pa_params.alpha_phi = nominal.alpha_phi * (1.0 + delta(rng));
        dev.pa_params.beta_phi = nominal.beta_phi * (1.0 + delta(rng));
        dev.validate();
        devices.push_back(std::move(dev));
    }
    return devices;
}

}  // namespace rffi::signal
