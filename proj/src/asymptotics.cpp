// integral asymptotics; see include/speclab/asymptotics.hpp
