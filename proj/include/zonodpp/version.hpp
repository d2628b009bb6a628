#ifndef ZONODPP_VERSION_HPP
#define ZONODPP_VERSION_HPP

#define ZONODPP_VERSION "0.1.0"

#endif
