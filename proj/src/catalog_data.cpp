// Generated by scripts/make_catalog.py; do not edit by hand.
#include "torific/catalog_data.hpp"

namespace torific {

const char* const kCatalogDocs[] = {
    R"json({"name":"P1","dimension":1,"vertices":[["-1"],["1"]],"rays":[[1],[-1]]})json",
    R"json({"name":"P2","dimension":2,"vertices":[["-1","-1"],["2","-1"],["-1","2"]],"rays":[[0,1],[-1,-1],[1,0]]})json",
    R"json({"name":"P112","dimension":2,"vertices":[["-1","-1"],["3","-1"],["-1","1"]],"rays":[[0,1],[-1,-2],[1,0]]})json",
    R"json({"name":"P1xP1","dimension":2,"vertices":[["-1","-1"],["1","-1"],["1","1"],["-1","1"]],"rays":[[0,1],[-1,0],[0,-1],[1,0]]})json",
    R"json({"name":"Bl1P2","dimension":2,"vertices":[["-1","0"],["0","-1"],["2","-1"],["-1","2"]],"rays":[[1,1],[0,1],[-1,-1],[1,0]]})json",
    R"json({"name":"R01","dimension":2,"vertices":[["-2","-1"],["1","-1"],["1","0"],["0","1"]],"rays":[[0,1],[-1,0],[-1,-1],[1,-1]]})json",
    R"json({"name":"Bl2P2","dimension":2,"vertices":[["-1","0"],["0","-1"],["1","-1"],["1","0"],["-1","2"]],"rays":[[1,1],[0,1],[-1,0],[-1,-1],[1,0]]})json",
    R"json({"name":"P123","dimension":2,"vertices":[["-1","-1"],["2","-1"],["-1","1"]],"rays":[[0,1],[-2,-3],[1,0]]})json",
    R"json({"name":"R02","dimension":2,"vertices":[["-1","-1"],["0","-1"],["1","1"],["-1","1"]],"rays":[[0,1],[-2,1],[0,-1],[1,0]]})json",
    R"json({"name":"R03","dimension":2,"vertices":[["-1","-1"],["0","-1"],["1","0"],["0","1"],["-1","1"]],"rays":[[0,1],[-1,1],[-1,-1],[0,-1],[1,0]]})json",
    R"json({"name":"Bl3P2","dimension":2,"vertices":[["-1","0"],["0","-1"],["1","-1"],["1","0"],["0","1"],["-1","1"]],"rays":[[1,1],[0,1],[-1,0],[-1,-1],[0,-1],[1,0]]})json",
    R"json({"name":"R04","dimension":2,"vertices":[["-1","-1"],["0","-1"],["1","0"],["-1","1"]],"rays":[[0,1],[-1,1],[-1,-2],[1,0]]})json",
    R"json({"name":"R05","dimension":2,"vertices":[["-1","-1"],["0","-1"],["1","0"],["0","1"],["-1","0"]],"rays":[[0,1],[-1,1],[-1,-1],[1,-1],[1,0]]})json",
    R"json({"name":"R06","dimension":2,"vertices":[["-1","-1"],["1","-1"],["0","1"]],"rays":[[0,1],[-2,-1],[2,-1]]})json",
    R"json({"name":"R07","dimension":2,"vertices":[["-1","-1"],["0","-1"],["1","0"],["0","1"]],"rays":[[0,1],[-1,1],[-1,-1],[2,-1]]})json",
    R"json({"name":"R08","dimension":2,"vertices":[["-1","0"],["0","-1"],["1","0"],["0","1"]],"rays":[[1,1],[-1,1],[-1,-1],[1,-1]]})json",
    R"json({"name":"R09","dimension":2,"vertices":[["-1","-1"],["1","0"],["0","1"]],"rays":[[-1,2],[-1,-1],[2,-1]]})json",
};
const int kCatalogDocCount = 17;

}  // namespace torific
