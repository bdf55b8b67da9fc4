# run.py

from flask.cli import FlaskGroup

from app import create_app, density, experiments, sequences
from app.cm_traces import CURVE_27A, CURVE_32A
from app.measures import ARCSINE_CM, SEMICIRCLE, UNIFORM

# 1. Create the application instance using the factory
app = create_app()


# 2. Make the library available in 'flask shell' for interactive checks
@app.shell_context_processor
def make_shell_context():
    return {
        'density': density,
        'experiments': experiments,
        'sequences': sequences,
        'CURVE_32A': CURVE_32A,
        'CURVE_27A': CURVE_27A,
        'ARCSINE_CM': ARCSINE_CM,
        'SEMICIRCLE': SEMICIRCLE,
        'UNIFORM': UNIFORM,
    }


# 3. `python run.py thm1 ...` behaves like `flask --app run thm1 ...`
cli = FlaskGroup(create_app=lambda: app)

if __name__ == '__main__':
    cli()
