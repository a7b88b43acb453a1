import os


def _flag(value):
    return str(value).strip().lower() not in ("0", "false", "no", "off")


class Config:
    SQLALCHEMY_DATABASE_URI = os.environ.get('DATABASE_URL') or 'sqlite:///app.db'
    SQLALCHEMY_TRACK_MODIFICATIONS = False
    SECRET_KEY = os.environ.get('SECRET_KEY') or 'dev-key-for-flask-application'

    LOG_LEVEL = os.environ.get('HOMOLOGY_LOG_LEVEL') or 'INFO'
    # text | machine
    REPORT_FORMAT = os.environ.get('HOMOLOGY_REPORT_FORMAT') or 'text'
    RUN_CHECKS = _flag(os.environ.get('HOMOLOGY_RUN_CHECKS') or 'true')
    SCENARIO_DIR = os.environ.get('HOMOLOGY_SCENARIO_DIR') or 'scenarios'
