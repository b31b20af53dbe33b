// Copyright 2026 The encsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return encsim::cli::run(argc, argv, std::cout, std::cerr); }
