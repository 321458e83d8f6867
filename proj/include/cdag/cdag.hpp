#pragma once

#include "cdag/errors.hpp"
#include "cdag/admg.hpp"
#include "cdag/separation.hpp"
#include "cdag/cluster_dag.hpp"
#include "cdag/docalc.hpp"
#include "cdag/joint_table.hpp"
#include "cdag/expr.hpp"
#include "cdag/evaluate.hpp"
#include "cdag/expansion.hpp"
#include "cdag/identify.hpp"
#include "cdag/rng.hpp"
#include "cdag/oracle.hpp"
#include "cdag/scm.hpp"
#include "cdag/sampler.hpp"
#include "cdag/graph_file.hpp"
#include "cdag/simulate.hpp"
