"""
Learning components: optimizers, conditional generators and the BiKT schedule.
"""
