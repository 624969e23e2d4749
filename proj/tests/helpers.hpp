#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <coalition/error.hpp>

// Runs `f`, expecting it to throw coalition::Error; yields the code so tests
// can assert on the category without string-matching the whole message.
template <typename F>
coalition::errc error_code_of(F&& f) {
  try {
    f();
  } catch (const coalition::Error& e) {
    return e.code();
  }
  FAIL("expected a coalition::Error");
  return coalition::errc::invalid_argument;
}
