#pragma once
// Embedded copies of the catalog documents (generated by
// scripts/make_catalog.py, kept in sync with data/catalog/).

namespace torific {

extern const char* const kCatalogDocs[];
extern const int kCatalogDocCount;

}  // namespace torific
