from sparsity_roofline.main import app

app(prog_name="sparsity-roofline")
