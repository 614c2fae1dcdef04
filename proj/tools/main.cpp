// Copyright 2026 The fbsdiff Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return fbs::cli::run(argc, argv, std::cout, std::cerr); }
