#ifndef RFFI_SIGNAL_DEVICE_HPP
#define RFFI_SIGNAL_DEVICE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rffi/signal/lora.hpp"

namespace rffi::signal {

// Saleh memoryless amplifier model.
//   AM/AM:  A(r)   = alpha_a * r / (1 + beta_a * r^2)
//   AM/PM:  Phi(r) = alpha_phi * r^2 / (1 + beta_phi * r^2)   [radians]
// The per-device spread of these four coefficients is the fingerprint.
struct SalehParams {
    double alpha_a = 2.0;
    double beta_a = 1.0;
    double alpha_phi = 0.5235987755982988;  // pi/6
    double beta_phi = 1.0;

    double am_am(double r) const { return alpha_a * r / (1.0 + beta_a * r * r); }
    double am_pm(double r) const { return alpha_phi * r * r / (1.0 + beta_phi * r * r); }
};

struct DeviceProfile {
    std::string device_id;
    SalehParams pa_params;
    std::uint64_t perturbation_seed = 0;

    void validate() const;
};

struct PowerLevel {
    enum class Tag { high, low };
    Tag tag = Tag::high;
    double tx_power_dbm = 17.0;

    static PowerLevel high(double dbm = 17.0) { return {Tag::high, dbm}; }
    static PowerLevel low(double dbm = 10.0) { return {Tag::low, dbm}; }
};

// Drive-level mapping: 17 dBm corresponds to normalized input amplitude 0.9
// into the Saleh model; other powers scale by 10^((p-17)/20). Simulator
// convention, chosen so the high level sits in the compressive region
// without clipping and the low level in the near-linear region.
constexpr double kDriveReferenceDbm = 17.0;
constexpr double kDriveReferenceAmplitude = 0.9;

double drive_amplitude(double tx_power_dbm);

// Scales a unit-peak signal to the drive level for `p`, then applies the
// device's AM/AM and AM/PM curves sample by sample.
BasebandSignal apply_pa(const BasebandSignal& signal, const DeviceProfile& dev, const PowerLevel& p);

// n profiles around the shared nominal Saleh parameters, each coefficient
// multiplied by (1 + delta) with delta ~ U(-bound, bound). bound <= 0.1
// keeps every sampled amplifier monotone over the operating range.
std::vector<DeviceProfile> sample_device_population(std::size_t n, std::uint64_t seed,
                                                    const std::string& id_prefix = "dev",
                                                    double perturbation_bound = 0.1);

}  // namespace rffi::signal

#endif
