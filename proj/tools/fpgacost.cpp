// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "fpgacost/cli.hpp"

int main(int argc, char** argv) { return fpgacost::run_cli(argc, argv, std::cout, std::cerr); }
