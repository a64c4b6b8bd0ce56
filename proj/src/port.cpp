#include "autohouse/port.hpp"

#include <cstdio>

namespace autohouse {

namespace {

constexpr std::array<LineInfo, kLineCount> kLines{{
    {LineName::D0, LineGroup::Data, "D0", 2, false},
    {LineName::D1, LineGroup::Data, "D1", 3, false},
    {LineName::D2, LineGroup::Data, "D2", 4, false},
    {LineName::D3, LineGroup::Data, "D3", 5, false},
    {LineName::D4, LineGroup::Data, "D4", 6, false},
    {LineName::D5, LineGroup::Data, "D5", 7, false},
    {LineName::D6, LineGroup::Data, "D6", 8, false},
    {LineName::D7, LineGroup::Data, "D7", 9, false},
    {LineName::Error, LineGroup::Status, "ERROR", 15, false},
    {LineName::Slct, LineGroup::Status, "SLCT", 13, false},
    {LineName::Pe, LineGroup::Status, "PE", 12, false},
    {LineName::Ack, LineGroup::Status, "ACK", 10, false},
    {LineName::Busy, LineGroup::Status, "BUSY", 11, true},
    {LineName::AutoFd, LineGroup::Control, "AUTOFD", 14, true},
    {LineName::Init, LineGroup::Control, "INIT", 16, false},
    {LineName::SlctIn, LineGroup::Control, "SLCTIN", 17, true},
}};

// Status register bit for each status line, in kStatusLines order.
constexpr std::array<int, 5> kStatusBit{3, 4, 5, 6, 7};

Level level_of(bool high) { return high ? Level::High : Level::Low; }

std::string hex_byte(std::uint8_t value) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02X", value);
  return buf;
}

}  // namespace

const std::array<LineInfo, kLineCount>& all_lines() { return kLines; }

const LineInfo& line_info(LineName line) { return kLines[static_cast<std::size_t>(line)]; }

int pin_of_line(LineName line) { return line_info(line).pin; }

std::string_view to_string(LineName line) { return line_info(line).name; }

std::optional<LineName> line_from_string(std::string_view name) {
  for (const auto& info : kLines) {
    if (info.name == name) return info.line;
  }
  return std::nullopt;
}

LineGroup group_of(LineName line) { return line_info(line).group; }

std::string_view to_string(Level level) { return level == Level::High ? "High" : "Low"; }

std::optional<Level> level_from_string(std::string_view name) {
  if (name == "High") return Level::High;
  if (name == "Low") return Level::Low;
  return std::nullopt;
}

MalformedStatus::MalformedStatus(std::uint8_t value)
    : std::invalid_argument("malformed status byte " + hex_byte(value) + ": reserved bits 0-2 set"),
      value_(value) {}

PortUpdate write_data(const PortRegisters& regs, const LineLevels& levels, std::uint8_t value) {
  PortUpdate out{regs, levels, false};
  out.regs.data = value;
  for (int bit = 0; bit < 8; ++bit) {
    out.levels.set(static_cast<LineName>(bit), level_of((value >> bit) & 1U));
  }
  return out;
}

std::uint8_t encode_status(const LineLevels& levels) {
  std::uint8_t value = 0;
  for (std::size_t i = 0; i < kStatusLines.size(); ++i) {
    const auto& info = line_info(kStatusLines[i]);
    const bool bit = levels.high(info.line) != info.inverted;
    if (bit) value |= static_cast<std::uint8_t>(1U << kStatusBit[i]);
  }
  return value;
}

LineLevels decode_status(std::uint8_t value) {
  if (value & kStatusReservedMask) throw MalformedStatus(value);
  LineLevels levels;
  for (std::size_t i = 0; i < kStatusLines.size(); ++i) {
    const auto& info = line_info(kStatusLines[i]);
    const bool bit = (value >> kStatusBit[i]) & 1U;
    levels.set(info.line, level_of(bit != info.inverted));
  }
  return levels;
}

PortUpdate write_control(const PortRegisters& regs, const LineLevels& levels, std::uint8_t value) {
  PortUpdate out{regs, levels, (value & ~kControlMask) != 0};
  out.regs.control = value & kControlMask;
  out.levels.set(LineName::AutoFd, level_of(!(value & 0x02)));
  out.levels.set(LineName::Init, level_of(value & 0x04));
  out.levels.set(LineName::SlctIn, level_of(!(value & 0x08)));
  return out;
}

void DirectPortBackend::write_data(std::uint8_t) {
  throw HalError("direct port access is not supported in this build");
}

std::uint8_t DirectPortBackend::read_status() {
  throw HalError("direct port access is not supported in this build");
}

void DirectPortBackend::write_control(std::uint8_t) {
  throw HalError("direct port access is not supported in this build");
}

}  // namespace autohouse
