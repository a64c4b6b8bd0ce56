#include "autohouse/card.hpp"

#include <algorithm>
#include <stdexcept>

namespace autohouse {

namespace {

std::array<RelayChannel, kChannelCount> derive_channels(bool powered, std::uint8_t data) {
  auto channels = CardState::rest_channels();
  if (!powered) return channels;
  for (auto& ch : channels) {
    if ((data >> ch.index) & 1U) {
      ch.bias = Bias::Reverse;
      ch.terminal = Terminal::T2;
      ch.led = true;
    }
  }
  return channels;
}

}  // namespace

bool ratings_consistent(const ComponentRatings& r) {
  const double positives[] = {r.relay_coil_volts,     r.contact_max_volts,   r.contact_max_amps,
                              r.transistor_min_volts, r.transistor_max_volts, r.transistor_max_amps,
                              r.capacitor_farads,     r.capacitor_max_volts, r.transformer_volts_ac,
                              r.transformer_amps,     r.mains_volts_ac};
  const bool all_positive = std::all_of(std::begin(positives), std::end(positives), [](double v) { return v > 0; });
  auto ohms = r.resistor_ohms;
  std::sort(ohms.begin(), ohms.end());
  return all_positive && r.transistor_min_volts <= r.transistor_max_volts && ohms[0] == 1000.0 &&
         ohms[1] == 4700.0 && !r.transistor_model.empty();
}

std::string_view to_string(Bias bias) { return bias == Bias::Forward ? "Forward" : "Reverse"; }

std::string_view to_string(Terminal terminal) { return terminal == Terminal::T1 ? "T1" : "T2"; }

std::array<RelayChannel, kChannelCount> CardState::rest_channels() {
  std::array<RelayChannel, kChannelCount> channels{};
  for (std::size_t i = 0; i < kChannelCount; ++i) channels[i].index = static_cast<std::uint8_t>(i);
  return channels;
}

std::uint8_t CardState::energized_mask() const {
  std::uint8_t mask = 0;
  for (const auto& ch : channels) {
    if (ch.terminal == Terminal::T2) mask |= static_cast<std::uint8_t>(1U << ch.index);
  }
  return mask;
}

CardState powered_card() { return set_power(CardState{}, true); }

double rectify(double ac_rms_volts) {
  if (!(ac_rms_volts >= 0)) throw std::domain_error("rectify: AC input must be non-negative");
  return ac_rms_volts;
}

CardState apply_data(const CardState& card, std::uint8_t value) {
  CardState next = card;
  next.latched_data = value;
  next.channels = derive_channels(next.powered, value);
  return next;
}

CardState set_power(const CardState& card, bool on) {
  CardState next = card;
  next.powered = on;
  next.dc_rail_volts = on ? rectify(ComponentRatings{}.transformer_volts_ac) : 0.0;
  next.channels = derive_channels(on, next.latched_data);
  return next;
}

std::string_view to_string(FaultKind kind) {
  return kind == FaultKind::OverCurrent ? "OverCurrent" : "OverVoltage";
}

std::optional<LoadFault> validate_load(const ComponentRatings& ratings, double volts_ac, double amps,
                                       std::optional<std::uint8_t> channel) {
  if (!(volts_ac >= 0) || !(amps >= 0)) throw std::domain_error("validate_load: negative load");
  if (amps > ratings.contact_max_amps) return LoadFault{FaultKind::OverCurrent, channel, amps, "A"};
  if (volts_ac > ratings.contact_max_volts) return LoadFault{FaultKind::OverVoltage, channel, volts_ac, "V"};
  return std::nullopt;
}

}  // namespace autohouse
