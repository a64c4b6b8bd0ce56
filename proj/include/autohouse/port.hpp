#pragma once

// autohouse/port.hpp
//
// Standard-parallel-port model for the relay card interface. The connector is
// split into three groups:
//
//   data    D0..D7                    pins 2..9          outputs, not inverted
//   status  ERROR SLCT PE ACK BUSY    pins 15 13 12 10 11  inputs, BUSY inverted
//   control AUTOFD INIT SLCTIN        pins 14 16 17      outputs, AUTOFD/SLCTIN inverted
//
// Register layout follows the SPP convention: status bits 3..7 and control
// bits 1..3. Status bits 0..2 and control bits 0, 4..7 always read 0 (STROBE
// is not wired on this card).

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace autohouse {

enum class LineGroup : std::uint8_t { Data, Status, Control };

enum class LineName : std::uint8_t {
  D0, D1, D2, D3, D4, D5, D6, D7,
  Error, Slct, Pe, Ack, Busy,
  AutoFd, Init, SlctIn,
};

inline constexpr std::size_t kLineCount = 16;

enum class Level : std::uint8_t { Low, High };

struct LineInfo {
  LineName line;
  LineGroup group;
  std::string_view name;
  int pin;
  bool inverted;
};

const std::array<LineInfo, kLineCount>& all_lines();
const LineInfo& line_info(LineName line);

int pin_of_line(LineName line);
std::string_view to_string(LineName line);
std::optional<LineName> line_from_string(std::string_view name);
LineGroup group_of(LineName line);

std::string_view to_string(Level level);
std::optional<Level> level_from_string(std::string_view name);

inline constexpr std::array<LineName, 5> kStatusLines{
    LineName::Error, LineName::Slct, LineName::Pe, LineName::Ack, LineName::Busy};
inline constexpr std::array<LineName, 3> kControlLines{
    LineName::AutoFd, LineName::Init, LineName::SlctIn};

/// Physical wire levels for every line on the connector.
class LineLevels {
 public:
  LineLevels() { levels_.fill(Level::Low); }

  Level get(LineName line) const { return levels_[index(line)]; }
  void set(LineName line, Level level) { levels_[index(line)] = level; }
  bool high(LineName line) const { return get(line) == Level::High; }

  bool operator==(const LineLevels&) const = default;

 private:
  static std::size_t index(LineName line) { return static_cast<std::size_t>(line); }
  std::array<Level, kLineCount> levels_{};
};

struct PortRegisters {
  std::uint8_t data = 0;
  std::uint8_t status = 0x80;  // all status wires Low
  std::uint8_t control = 0;

  bool operator==(const PortRegisters&) const = default;
};

inline constexpr std::uint8_t kStatusReservedMask = 0x07;
inline constexpr std::uint8_t kControlMask = 0x0E;

class MalformedStatus : public std::invalid_argument {
 public:
  explicit MalformedStatus(std::uint8_t value);
  std::uint8_t value() const { return value_; }

 private:
  std::uint8_t value_;
};

struct PortUpdate {
  PortRegisters regs;
  LineLevels levels;
  bool masked = false;  // control write had bits outside 0x0E
};

/// Latches `value` into the data register and drives D0..D7 to match.
PortUpdate write_data(const PortRegisters& regs, const LineLevels& levels, std::uint8_t value);

std::uint8_t encode_status(const LineLevels& levels);

/// Inverse of encode_status. Only status lines are set in the result.
/// Throws MalformedStatus if any of bits 0..2 is set.
LineLevels decode_status(std::uint8_t value);

/// Stores value & 0x0E and drives AUTOFD = !bit1, INIT = bit2, SLCTIN = !bit3.
PortUpdate write_control(const PortRegisters& regs, const LineLevels& levels, std::uint8_t value);

class HalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The only channel between the controller and the card. Implementations
/// throw HalError on transport failure.
class HalBackend {
 public:
  virtual ~HalBackend() = default;

  virtual void write_data(std::uint8_t value) = 0;
  /// Must not mutate any register or line level.
  virtual std::uint8_t read_status() = 0;
  virtual void write_control(std::uint8_t value) = 0;

  virtual bool is_simulator() const { return false; }
};

/// Backend for a physical port at an I/O base address. Declared for the
/// configuration surface only; every operation reports HalError.
class DirectPortBackend final : public HalBackend {
 public:
  explicit DirectPortBackend(std::uint16_t io_base = 0x378) : io_base_(io_base) {}

  void write_data(std::uint8_t value) override;
  std::uint8_t read_status() override;
  void write_control(std::uint8_t value) override;

  std::uint16_t io_base() const { return io_base_; }

 private:
  std::uint16_t io_base_;
};

}  // namespace autohouse
