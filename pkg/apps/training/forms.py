from django import forms
from django.utils.translation import gettext_lazy as _

from .trainer import PRESETS


class TrainConfigForm(forms.Form):
    """
    Validates training hyperparameters coming from flags or a config file.

    Values are strings or numbers; unset fields fall back to the preset.
    """
    preset = forms.ChoiceField(choices=[(name, name) for name in PRESETS], required=False)
    batch_size = forms.IntegerField(min_value=1, required=False)
    learning_rate = forms.FloatField(min_value=0.0, required=False)
    momentum = forms.FloatField(min_value=0.0, required=False)
    weight_decay = forms.FloatField(min_value=0.0, required=False)
    epochs = forms.IntegerField(min_value=1, required=False)
    decay_period = forms.IntegerField(min_value=1, required=False)
    decay_factor = forms.FloatField(required=False)
    seed = forms.IntegerField(min_value=0, required=False)

    def clean_momentum(self):
        momentum = self.cleaned_data.get('momentum')
        if momentum is not None and momentum >= 1.0:
            raise forms.ValidationError(_('Momentum must be below 1'))
        return momentum

    def clean_decay_factor(self):
        factor = self.cleaned_data.get('decay_factor')
        if factor is not None and not (0.0 < factor <= 1.0):
            raise forms.ValidationError(_('Decay factor must lie in (0, 1]'))
        return factor

    def to_config(self):
        data = dict(self.cleaned_data)
        preset = PRESETS[data.pop('preset') or 'imagenet']
        overrides = {key: value for key, value in data.items() if value is not None}
        return preset(**overrides)

    def error_text(self):
        return '; '.join(
            f"{field}: {' '.join(str(message) for message in messages)}"
            for field, messages in self.errors.items()
        )
