#pragma once
// Shared doctest entry point: each test binary defines its own main via this header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
