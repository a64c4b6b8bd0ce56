#pragma once

// autohouse/card.hpp
//
// Behavioral model of the 8-channel relay card. Each channel is a transistor
// driven relay: a 0 bit leaves it forward biased on terminal T1, a 1 bit
// reverse biases it onto T2 and lights its LED. T2 is the load-energized
// contact. With the 12 V rail down every relay rests on T1.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace autohouse {

inline constexpr std::size_t kChannelCount = 8;

struct ComponentRatings {
  double relay_coil_volts = 12.0;
  double contact_max_volts = 220.0;
  double contact_max_amps = 5.0;
  std::string transistor_model = "C945";
  double transistor_min_volts = 1.0;
  double transistor_max_volts = 1.5;
  double transistor_max_amps = 0.3;
  std::array<double, 2> resistor_ohms{1000.0, 4700.0};
  double capacitor_farads = 2200e-6;
  double capacitor_max_volts = 25.0;
  double transformer_volts_ac = 12.0;
  double transformer_amps = 1.0;
  double mains_volts_ac = 220.0;
};

/// True if every rating is strictly positive and the resistor set is {1k, 4.7k}.
bool ratings_consistent(const ComponentRatings& ratings);

enum class Bias : std::uint8_t { Forward, Reverse };
enum class Terminal : std::uint8_t { T1, T2 };

std::string_view to_string(Bias bias);
std::string_view to_string(Terminal terminal);

struct RelayChannel {
  std::uint8_t index = 0;
  Bias bias = Bias::Forward;
  Terminal terminal = Terminal::T1;
  bool led = false;

  bool operator==(const RelayChannel&) const = default;
};

struct CardState {
  bool powered = false;
  double dc_rail_volts = 0.0;
  std::uint8_t latched_data = 0;
  std::array<RelayChannel, kChannelCount> channels = rest_channels();

  /// Bit i set iff channel i sits on T2.
  std::uint8_t energized_mask() const;

  bool operator==(const CardState&) const = default;

  static std::array<RelayChannel, kChannelCount> rest_channels();
};

/// A card fed by the 12 V adapter with nothing latched.
CardState powered_card();

/// Ideal bridge + smoothing capacitor: RMS volts in, DC volts out, no ripple.
/// Throws std::domain_error for negative input.
double rectify(double ac_rms_volts);

CardState apply_data(const CardState& card, std::uint8_t value);
CardState set_power(const CardState& card, bool on);

enum class FaultKind : std::uint8_t { OverCurrent, OverVoltage };

std::string_view to_string(FaultKind kind);

struct LoadFault {
  FaultKind kind;
  std::optional<std::uint8_t> channel;
  double observed;
  std::string_view unit;

  bool operator==(const LoadFault&) const = default;
};

/// Checks a switched load against the relay contact rating. Limits are
/// inclusive. If both are exceeded the current fault is reported.
/// Throws std::domain_error for negative arguments.
std::optional<LoadFault> validate_load(const ComponentRatings& ratings, double volts_ac, double amps,
                                       std::optional<std::uint8_t> channel = std::nullopt);

}  // namespace autohouse
