# Entity models (Pydantic schemas)
