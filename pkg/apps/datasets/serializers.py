"""
Record serializers for the JSON-lines formats.

Boxes are always ``[x1, y1, x2, y2]``; a box written in another order is
rejected rather than reinterpreted.
"""
from rest_framework import serializers

from apps.core.exceptions import InvalidInputError
from apps.core.tensors import BBox, ImageDims


class BoxField(serializers.ListField):
    """A ``[x1, y1, x2, y2]`` list validated into a :class:`BBox`."""

    child = serializers.FloatField()

    def to_internal_value(self, data):
        values = super().to_internal_value(data)
        if len(values) != 4:
            raise serializers.ValidationError(f'a box needs 4 coordinates, got {len(values)}')
        try:
            return BBox.from_list(values)
        except InvalidInputError as exc:
            raise serializers.ValidationError(
                f'{exc}; boxes must use (x1, y1, x2, y2) coordinate order'
            )

    def to_representation(self, value):
        return value.as_list()


def _check_inside(boxes, width, height):
    dims = ImageDims(height, width)
    for box in boxes:
        if not box.within(dims):
            raise serializers.ValidationError(
                {'boxes': f'box {box.as_list()} exceeds image {width}x{height}'}
            )


class AnnotationSerializer(serializers.Serializer):
    image_id = serializers.CharField(trim_whitespace=False)
    width = serializers.IntegerField(min_value=1)
    height = serializers.IntegerField(min_value=1)
    label = serializers.CharField(trim_whitespace=False)
    boxes = serializers.ListField(child=BoxField(), required=False)
    top1_correct = serializers.BooleanField(required=False, allow_null=True)

    def validate(self, attrs):
        _check_inside(attrs.get('boxes', []), attrs['width'], attrs['height'])
        return attrs


class PredictionSerializer(serializers.Serializer):
    image_id = serializers.CharField(trim_whitespace=False)
    box = BoxField()
    mask_path = serializers.CharField(required=False, allow_null=True)
    components = serializers.ListField(child=BoxField(), required=False)


class ClassFieldMixin:
    """Adds the ``class`` key, which cannot be declared as an attribute."""

    class_required = False

    def get_fields(self):
        fields = super().get_fields()
        fields['class'] = serializers.CharField(
            required=self.class_required, allow_null=not self.class_required, trim_whitespace=False,
        )
        return fields


class ProposalSerializer(ClassFieldMixin, serializers.Serializer):
    image_id = serializers.CharField(trim_whitespace=False)
    box = BoxField()


class DetectionSerializer(ClassFieldMixin, serializers.Serializer):
    class_required = True

    image_id = serializers.CharField(trim_whitespace=False)
    score = serializers.FloatField()
    box = BoxField()


class ScoredProposalSerializer(ClassFieldMixin, serializers.Serializer):
    image_id = serializers.CharField(trim_whitespace=False)
    box = BoxField()
    objectness = serializers.FloatField(min_value=0.0, max_value=1.0)
    filtered = serializers.BooleanField()


def flatten_errors(errors, prefix=''):
    """Turn a nested DRF error dict into one readable line."""
    parts = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            name = key if key != 'non_field_errors' else ''
            parts.append(flatten_errors(value, f'{prefix}{name}: ' if name else prefix))
    elif isinstance(errors, list):
        parts.extend(flatten_errors(value, prefix) for value in errors)
    else:
        parts.append(f'{prefix}{errors}')
    return '; '.join(part for part in parts if part)
