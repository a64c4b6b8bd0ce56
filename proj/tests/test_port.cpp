#include <doctest.h>

#include <set>

#include "autohouse/port.hpp"

using namespace autohouse;

namespace {

LineLevels status_levels(unsigned mask) {
  LineLevels levels;
  for (std::size_t i = 0; i < kStatusLines.size(); ++i) {
    levels.set(kStatusLines[i], (mask >> i) & 1U ? Level::High : Level::Low);
  }
  return levels;
}

}  // namespace

TEST_CASE("pin map matches the connector table") {
  CHECK(pin_of_line(LineName::D0) == 2);
  CHECK(pin_of_line(LineName::Busy) == 11);
  CHECK(pin_of_line(LineName::SlctIn) == 17);

  const std::pair<LineName, int> expected[] = {
      {LineName::D0, 2},      {LineName::D1, 3},   {LineName::D2, 4},     {LineName::D3, 5},
      {LineName::D4, 6},      {LineName::D5, 7},   {LineName::D6, 8},     {LineName::D7, 9},
      {LineName::Error, 15},  {LineName::Slct, 13}, {LineName::Pe, 12},   {LineName::Ack, 10},
      {LineName::Busy, 11},   {LineName::AutoFd, 14}, {LineName::Init, 16}, {LineName::SlctIn, 17},
  };
  for (auto [line, pin] : expected) {
    CAPTURE(to_string(line));
    CHECK(pin_of_line(line) == pin);
  }
}

TEST_CASE("line table shape") {
  int data = 0, status = 0, control = 0;
  std::set<int> pins;
  for (const auto& info : all_lines()) {
    pins.insert(info.pin);
    switch (info.group) {
      case LineGroup::Data: ++data; break;
      case LineGroup::Status: ++status; break;
      case LineGroup::Control: ++control; break;
    }
    const bool should_invert =
        info.line == LineName::Busy || info.line == LineName::AutoFd || info.line == LineName::SlctIn;
    CHECK(info.inverted == should_invert);
    CHECK(line_from_string(info.name) == info.line);
  }
  CHECK(data == 8);
  CHECK(status == 5);
  CHECK(control == 3);
  CHECK(pins.size() == kLineCount);
  CHECK_FALSE(line_from_string("STROBE").has_value());
}

TEST_CASE("write_data drives the data pins") {
  const PortRegisters regs;
  const LineLevels levels;

  auto zero = write_data(regs, levels, 0x00);
  for (int i = 0; i < 8; ++i) CHECK(zero.levels.get(static_cast<LineName>(i)) == Level::Low);

  auto ones = write_data(regs, levels, 0xFF);
  for (int i = 0; i < 8; ++i) CHECK(ones.levels.get(static_cast<LineName>(i)) == Level::High);

  auto five = write_data(regs, levels, 0x05);
  for (const auto& info : all_lines()) {
    if (info.group != LineGroup::Data) continue;
    CAPTURE(info.name);
    CHECK(five.levels.high(info.line) == (info.pin == 2 || info.pin == 4));
  }
  CHECK(five.regs.status == regs.status);
  CHECK(five.regs.control == regs.control);
}

TEST_CASE("every byte reads back and matches the pin vector") {
  PortRegisters regs;
  LineLevels levels;
  for (int b = 0; b < 256; ++b) {
    auto up = write_data(regs, levels, static_cast<std::uint8_t>(b));
    CHECK(up.regs.data == b);
    for (int i = 0; i < 8; ++i) CHECK(up.levels.high(static_cast<LineName>(i)) == bool((b >> i) & 1));
    regs = up.regs;
    levels = up.levels;
  }
}

TEST_CASE("encode_status") {
  CHECK(encode_status(LineLevels{}) == 0x80);

  LineLevels ack;
  ack.set(LineName::Ack, Level::High);
  CHECK(encode_status(ack) == 0xC0);

  CHECK(encode_status(status_levels(0x1F)) == 0x78);
}

TEST_CASE("decode_status") {
  CHECK(decode_status(0x80) == LineLevels{});

  auto levels = decode_status(0x40);
  CHECK(levels.get(LineName::Ack) == Level::High);
  CHECK(levels.get(LineName::Busy) == Level::High);
  CHECK(levels.get(LineName::Error) == Level::Low);
  CHECK(levels.get(LineName::Slct) == Level::Low);
  CHECK(levels.get(LineName::Pe) == Level::Low);

  CHECK_THROWS_AS(decode_status(0x01), MalformedStatus);
  for (int low = 1; low < 8; ++low) CHECK_THROWS_AS(decode_status(static_cast<std::uint8_t>(0x80 | low)), MalformedStatus);
}

TEST_CASE("status round trip over all 32 line combinations") {
  for (unsigned mask = 0; mask < 32; ++mask) {
    const auto levels = status_levels(mask);
    const auto byte = encode_status(levels);
    CHECK((byte & kStatusReservedMask) == 0);
    CHECK(decode_status(byte) == levels);
  }
}

TEST_CASE("write_control") {
  const PortRegisters regs;
  const LineLevels levels;

  auto zero = write_control(regs, levels, 0x00);
  CHECK(zero.levels.get(LineName::AutoFd) == Level::High);
  CHECK(zero.levels.get(LineName::Init) == Level::Low);
  CHECK(zero.levels.get(LineName::SlctIn) == Level::High);
  CHECK_FALSE(zero.masked);

  auto set = write_control(regs, levels, 0x0E);
  CHECK(set.levels.get(LineName::AutoFd) == Level::Low);
  CHECK(set.levels.get(LineName::Init) == Level::High);
  CHECK(set.levels.get(LineName::SlctIn) == Level::Low);
  CHECK(set.regs.control == 0x0E);

  auto all = write_control(regs, levels, 0xFF);
  CHECK(all.regs.control == 0x0E);
  CHECK(all.masked);
  CHECK(all.regs.data == regs.data);
  CHECK(all.regs.status == regs.status);
}

TEST_CASE("direct port backend reports HAL errors") {
  DirectPortBackend port;
  CHECK_FALSE(port.is_simulator());
  CHECK_THROWS_AS(port.read_status(), HalError);
  CHECK_THROWS_AS(port.write_data(0x01), HalError);
  CHECK_THROWS_AS(port.write_control(0x00), HalError);
}
