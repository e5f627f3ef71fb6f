/* SPDX-FileCopyrightText: Copyright (c) 2026, the evidencer authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef EVIDENCER_VERSION_HPP
#define EVIDENCER_VERSION_HPP

namespace evidencer {

inline constexpr const char* kVersion = "1.0.0";

} // namespace evidencer

#endif
