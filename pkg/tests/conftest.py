import hypothesis

hypothesis.settings.register_profile(
    "pairspace", deadline=None, derandomize=True
)
hypothesis.settings.load_profile("pairspace")
