"""
Experiments Package

Sampler / evaluator / writer pipelines that run the lab's checks in batches
and stream their records as JSON lines or CSV.
"""
